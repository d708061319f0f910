#include "pglab/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pglab::bounds {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BoundReport two_arm_regret_bound(double delta2, double eta, double n) {
  if (!(delta2 > 0.0 && eta > 0.0 && n >= 0.0)) {
    throw std::invalid_argument("two_arm_regret_bound needs positive inputs");
  }
  BoundReport r{"two_arm_regret", {{"delta2", delta2}, {"eta", eta}, {"n", n}},
                kInf, false, ""};
  const double a = delta2 / eta;
  r.inputs["a"] = a;
  if (!(a > 1.0)) {
    r.hypothesis_notes = "requires a = delta2/eta > 1";
    return r;
  }
  r.hypotheses_met = true;
  const double log_term =
      a / (2.0 * delta2) *
      std::log1p(2.0 * (a + 1.0) * n * delta2 * delta2 / (a * a));
  const double pole_term = a * a / (2.0 * (a - 1.0) * delta2);
  r.value = log_term + pole_term;
  if (a - 1.0 < 1e-6) {
    r.hypothesis_notes = "near-degenerate: a is within 1e-6 of 1";
  }
  return r;
}

double upper_bound_threshold(double delta2, double n) {
  if (n < 3.0) {
    throw std::domain_error("upper_bound_threshold assumes n >= 3");
  }
  return delta2 * delta2 / (8.0 * std::log(2.0 * n * n));
}

BoundReport upper_bound_regret(int k, double eta, double n, double delta) {
  if (delta <= 0.0) delta = 1.0 / n;
  BoundReport r{"upper_bound_regret",
                {{"k", static_cast<double>(k)}, {"eta", eta}, {"n", n},
                 {"delta", delta}},
                kInf, true, ""};
  if (k < 2 || !(eta > 0.0) || !(n > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    r.hypotheses_met = false;
    r.hypothesis_notes = "needs k >= 2, eta > 0, n > 0, delta in (0,1)";
    return r;
  }
  r.value = 12.0 * k * std::log(n / delta) * std::log1p(k) / eta + 2.0 * k;
  if (n < 3.0) r.hypothesis_notes = "n < 3 lies outside the assumptions";
  return r;
}

double bm_drift_bound(double a, double eps) { return std::exp(-2.0 * a * eps); }

double bm_less_drift_bound(double a, double eps, double n) {
  return (1.0 + std::sqrt(n) / 2.0) *
         std::exp(-2.0 * a * eps / (std::numbers::e + 1.0));
}

double bm_less_drift_sufficient_a(double eps, double n, double delta) {
  return (std::numbers::e + 1.0) / (2.0 * eps) *
         std::log((1.0 + std::sqrt(n) / 2.0) / delta);
}

double s_max(double eta, double n, double eps) {
  return (std::log(400.0 / eta) + std::log(n)) / (1.0 - eps);
}

double stable_asinh(double x) {
  // asinh is odd; for x >= 0, log(x + sqrt(x^2+1)) has no cancellation.
  const double ax = std::fabs(x);
  double r;
  if (ax > 1e150) {
    r = std::log(ax) + std::numbers::ln2;
  } else {
    r = std::log1p(ax + ax * ax / (1.0 + std::sqrt(1.0 + ax * ax)));
  }
  return std::copysign(r, x);
}

ZThreshold z_threshold(double s, double eta, double eps) {
  ZThreshold out;
  out.argument = std::sqrt(eta) * (std::exp(-s) / 4.0 - 1.0 / 16.0) *
                 std::exp((1.0 - eps) * s / 2.0);
  out.threshold = 2.0 * stable_asinh(out.argument);
  out.relaxation = std::min(1.0, std::log(400.0 / eta) - (1.0 - eps) * s);
  return out;
}

}  // namespace pglab::bounds
