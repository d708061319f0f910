#include "pglab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pglab/bounds.hpp"

namespace pglab {

namespace {

// Norm of the noise vector coef * sqrt(pi) * sigma of a linear functional
// <coef, dtheta> / eta. coef(b) gives the coefficient of arm b after the
// projection (Id - pi 1^T) has been applied.
template <typename Coef>
double noise_norm(std::span<const double> pi, std::span<const double> sigma,
                  Coef coef) {
  double total = 0.0;
  for (std::size_t b = 0; b < pi.size(); ++b) {
    const double term = coef(b) * sigma[b];
    total += term * term * std::max(pi[b], 0.0);
  }
  return std::sqrt(total);
}

// Sum of pi over every arm except `skip`, i.e. 1 - pi[skip] without
// cancellation.
double mass_except(std::span<const double> pi, std::size_t skip) {
  double total = 0.0;
  for (std::size_t b = 0; b < pi.size(); ++b) {
    if (b != skip) total += pi[b];
  }
  return total;
}

// mu_0 - <pi, mu>, written as a sum of non-negative terms when arm 0 is best.
double regret_vs_first(std::span<const double> pi, std::span<const double> mu) {
  double r = 0.0;
  for (std::size_t b = 0; b < pi.size(); ++b) r += pi[b] * (mu[0] - mu[b]);
  return r;
}

IdentityCheck equality(std::string name, double lhs, double rhs, double scale,
                       double tol) {
  scale = std::max({scale, std::fabs(lhs), std::fabs(rhs)});
  return {std::move(name), lhs, rhs, false, std::fabs(lhs - rhs) <= tol * scale};
}

IdentityCheck inequality(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, true, lhs <= rhs};
}

}  // namespace

bool approx_equal(double a, double b, double rel_tol) {
  return std::fabs(a - b) <=
         rel_tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

ZCoefficients z_coefficients(const PolicyState& state,
                             const BanditInstance& inst, double eta,
                             std::size_t a) {
  if (a == 0 || a >= inst.k()) {
    throw std::invalid_argument("z_coefficients needs an arm index in [1, k)");
  }
  const auto& pi = state.pi;
  const auto mu = inst.mu();
  const double regret = regret_vs_first(pi, mu);
  const double gap = mu[0] - mu[a];
  const double diff = pi[0] - pi[a];

  ZCoefficients out;
  out.drift = eta * (pi[a] * gap + diff * regret);
  // pi_0 + pi_a - (pi_0 - pi_a)^2 expanded so nothing cancels as pi_0 -> 1.
  out.diffusion = eta * std::sqrt(pi[0] * mass_except(pi, 0) +
                                  pi[a] * mass_except(pi, a) + 2.0 * pi[0] * pi[a]);
  const auto grad = policy_gradient_from_pi(pi, mu);
  out.drift_inner_product = eta * (grad[0] - grad[a]);
  // Coefficients of e_0 - e_a - (pi_0 - pi_a) 1, using 1 - pi_0 = sum of
  // the other arms.
  const double coef0 = mass_except(pi, 0) + pi[a];
  const double coefa = -(pi[0] + mass_except(pi, a));
  out.diffusion_direct =
      eta * noise_norm(pi, inst.sigma(), [&](std::size_t b) {
        return b == 0 ? coef0 : b == a ? coefa : -diff;
      });
  return out;
}

LowerSdeCoefficients lower_sde_coefficients(const PolicyState& state,
                                            const BanditInstance& inst,
                                            double eta) {
  const std::size_t k = inst.k();
  if (k < 3) throw std::invalid_argument("lower_sde_coefficients needs k >= 3");
  const auto& theta = state.theta;
  const auto& pi = state.pi;
  for (std::size_t a = 3; a < k; ++a) {
    if (std::fabs(theta[a] - theta[2]) > 1e-9 * (1.0 + std::fabs(theta[2]))) {
      throw std::invalid_argument(
          "lower_sde_coefficients needs equal parameters on arms >= 2");
    }
  }
  double tail = 0.0;
  for (std::size_t a = 2; a < k; ++a) tail += pi[a];
  const double head = pi[0] + pi[1];
  if (!(tail > 0.0) || !(head > 0.0) || tail >= 1.0) {
    throw DegenerateState("tail mass is 0 or 1 in floating point");
  }

  const auto mu = inst.mu();
  const double delta2 = mu[0] - mu[1];
  const double regret = regret_vs_first(pi, mu);
  const double m = static_cast<double>(k - 2);
  const double S = theta[0] + theta[1];
  const double Z = theta[0] - theta[1];
  const double diff = pi[0] - pi[1];

  LowerSdeCoefficients c;
  c.clock_rate = eta * tail * head;
  c.drift_S = (1.0 - pi[1] * delta2 / head) * c.clock_rate;
  c.diffusion_S = std::sqrt(eta * tail * c.clock_rate);
  c.alpha = pi[1] * (1.0 + pi[0] - pi[1]) / (tail * head);
  c.pi_ratio = diff / head;
  c.sigma2 =
      1.0 + 4.0 * pi[0] * pi[1] / (tail * head) - head * c.pi_ratio * c.pi_ratio;
  c.G = std::exp((S + Z) / 2.0 + S / m) / m;

  c.drift_S_direct = eta * (pi[0] * regret + pi[1] * (regret - delta2));
  // e_0 + e_1 - (pi_0 + pi_1) 1 has coefficient pi_tail on the first two arms.
  c.diffusion_S_direct =
      eta * noise_norm(pi, inst.sigma(), [&](std::size_t b) {
        return b < 2 ? tail : -head;
      });
  c.tanh_half_Z = std::tanh(Z / 2.0);
  c.drift_Z_direct = eta * (pi[1] * delta2 + diff * regret);
  c.drift_Z_time_changed = (c.alpha * delta2 + c.tanh_half_Z) * c.clock_rate;
  // e_0 - e_1 - (pi_0 - pi_1) 1: 1 - diff = 2 pi_1 + pi_tail and
  // -1 - diff = -(2 pi_0 + pi_tail).
  const double z_noise =
      eta * noise_norm(pi, inst.sigma(), [&](std::size_t b) {
        if (b == 0) return 2.0 * pi[1] + tail;
        if (b == 1) return -(2.0 * pi[0] + tail);
        return -diff;
      });
  c.sigma2_direct = z_noise * z_noise / (eta * c.clock_rate);
  c.G_direct = pi[0] / tail;
  c.drift_S_scale = eta * (head * regret + pi[1] * delta2);
  c.drift_Z_scale =
      std::max(eta * (pi[1] * delta2 + std::fabs(diff) * regret),
               c.clock_rate * (c.alpha * delta2 + std::fabs(c.tanh_half_Z)));
  return c;
}

ClockSample lower_bound_clock(const PolicyState& state, double eta) {
  const auto& pi = state.pi;
  const auto& theta = state.theta;
  double tail = 0.0;
  for (std::size_t a = 2; a < pi.size(); ++a) tail += pi[a];
  const double m = static_cast<double>(pi.size() - 2);
  const double S = theta[0] + theta[1];
  const double Z = theta[0] - theta[1];
  return {eta * tail * (pi[0] + pi[1]),
          std::exp((S + Z) / 2.0 + S / m) / m};
}

std::vector<IdentityCheck> cross_checks(const LowerSdeCoefficients& c,
                                        double tol) {
  std::vector<IdentityCheck> out;
  out.push_back(equality("drift_S closed form vs direct", c.drift_S,
                         c.drift_S_direct, c.drift_S_scale, tol));
  out.push_back(equality("diffusion_S closed form vs noise aggregation",
                         c.diffusion_S, c.diffusion_S_direct, 0.0, tol));
  out.push_back(equality("tanh(Z/2) vs (pi0-pi1)/(pi0+pi1)", c.tanh_half_Z,
                         c.pi_ratio, 1.0, tol));
  out.push_back(equality("drift_Z direct vs time-changed", c.drift_Z_direct,
                         c.drift_Z_time_changed, c.drift_Z_scale, tol));
  out.push_back(equality("sigma2 closed form vs noise aggregation", c.sigma2,
                         c.sigma2_direct, 1.0, tol));
  out.push_back(equality("G exponential form vs pi0/pi_tail", c.G, c.G_direct,
                         0.0, tol));
  out.push_back(inequality("alpha <= 1 + 2G", c.alpha, 1.0 + 2.0 * c.G));
  out.push_back(inequality("1 - tanh(Z/2)^2 <= sigma2",
                           1.0 - c.tanh_half_Z * c.tanh_half_Z, c.sigma2));
  out.push_back(inequality("sigma2 <= 1 + 4G", c.sigma2, 1.0 + 4.0 * c.G));
  return out;
}

LowerBoundMonitor::LowerBoundMonitor(std::size_t k, double eta, double n,
                                     double delta2)
    : m_(static_cast<int>(k) - 2), eta_(eta), delta2_(delta2) {
  if (k < 5) {
    throw std::invalid_argument(
        "lower-bound monitor needs k >= 5 so that eps = 2/(k-2) < 1");
  }
  if (!(eta > 0.0) || !(n > 0.0)) {
    throw std::invalid_argument("lower-bound monitor needs eta > 0, n > 0");
  }
  eps_ = 2.0 / m_;
  s_max_ = bounds::s_max(eta, n, eps_);
}

std::optional<StopCondition> LowerBoundMonitor::check(double S, double Z,
                                                      double s) const {
  if (!(S > (1.0 - delta2_) * s - 1.0 && S < s + 1.0)) {
    return StopCondition::kSWindow;
  }
  if (Z >= bounds::z_threshold(s, eta_, eps_).threshold) {
    return StopCondition::kZThreshold;
  }
  if (s >= s_max_) return StopCondition::kClockMax;
  return std::nullopt;
}

bool LowerBoundMonitor::observe(double t, double S, double Z, double s,
                                double G) {
  if (first_fire_) return false;
  if (auto fired = check(S, Z, s)) {
    first_fire_ = StopEvent{*fired, t, s};
    return true;
  }
  if (Z > bounds::z_threshold(s, eta_, eps_).relaxation) ++z_violations_;
  if (G > 8.0 / m_ * std::exp(s / 2.0)) ++g1_exceeded_;
  if (G > 200.0 / (m_ * std::sqrt(eta_))) ++g2_exceeded_;
  max_G_ = std::max(max_G_, G);
  return false;
}

void LowerBoundMonitor::finish(double t, double s) {
  if (!first_fire_) first_fire_ = StopEvent{StopCondition::kHorizon, t, s};
}

std::optional<StopCondition> check_def_tau(double S, double Z, double s,
                                           const LowerBoundMonitor& monitor) {
  return monitor.check(S, Z, s);
}

PsiParams::PsiParams(int k_, double n_, double delta_)
    : k(k_), n(n_), delta(delta_) {
  if (k < 1) throw std::invalid_argument("PsiParams needs k >= 1");
  if (!(n >= 3.0)) throw std::invalid_argument("PsiParams needs n >= 3");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("PsiParams needs delta in (0, 1)");
  }
}

double PsiParams::log_ratio() const { return std::log(n / delta); }

namespace {
double psi_shift(double u, const PsiParams& p) {
  const double x = u + 1.0 + p.log_ratio();
  if (!(x > 0.0)) throw std::domain_error("psi evaluated at or below its pole");
  return x;
}
}  // namespace

double psi(double u, const PsiParams& p) {
  const double L = p.log_ratio();
  psi_shift(u, p);
  return 6.0 * p.k * L * std::log1p(u / (1.0 + L));
}

double psi_prime(double u, const PsiParams& p) {
  return 6.0 * p.k * p.log_ratio() / psi_shift(u, p);
}

double psi_second(double u, const PsiParams& p) {
  const double x = psi_shift(u, p);
  return -6.0 * p.k * p.log_ratio() / (x * x);
}

LemmaPiCheck check_lemma_pi(std::span<const double> theta, const PsiParams& p) {
  if (theta.size() != static_cast<std::size_t>(p.k)) {
    throw std::invalid_argument("check_lemma_pi: theta length differs from k");
  }
  const double L = p.log_ratio();
  const double k = static_cast<double>(theta.size());
  const double peak = *std::max_element(theta.begin(), theta.end());
  bool applicable = std::fabs(sum(theta)) <= 1e-8 && theta[0] >= peak - 1.0;
  for (double v : theta) applicable = applicable && v >= -L && v <= k * L;

  LemmaPiCheck out;
  out.applicable = applicable;
  out.lhs = 0.0;
  for (double v : theta) out.lhs += std::exp(v - theta[0]);
  const double denom = theta[0] + 1.0 + L;
  out.rhs = denom > 0.0 ? 6.0 * k * L / denom
                        : std::numeric_limits<double>::infinity();
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace pglab
