#pragma once

#include <map>
#include <string>

namespace pglab::bounds {

/// A closed-form bound evaluated at specific inputs. When the bound's
/// hypotheses fail the value is +infinity and hypotheses_met is false.
struct BoundReport {
  std::string name;
  std::map<std::string, double> inputs;
  double value = 0.0;
  bool hypotheses_met = true;
  std::string hypothesis_notes;
};

/// Expected-regret bound for two arms when a = delta2 / eta > 1.
BoundReport two_arm_regret_bound(double delta2, double eta, double n);

/// Largest learning rate covered by the k-armed upper bound:
/// delta2^2 / (8 log(2 n^2)). Throws std::domain_error for n < 3.
double upper_bound_threshold(double delta2, double n);

/// 12 k log(n/delta) log(1+k) / eta + 2k; delta defaults to 1/n.
BoundReport upper_bound_regret(int k, double eta, double n,
                               double delta = 0.0);

/// P(inf X <= -eps) bound for dX = a dt + dB: exp(-2 a eps).
double bm_drift_bound(double a, double eps);

/// P(inf_{t<=n} X <= -eps) bound for dX = a/(e^X + 1) dt + dB.
double bm_less_drift_bound(double a, double eps, double n);

/// Smallest drift a for which bm_less_drift_bound(a, eps, n) <= delta.
double bm_less_drift_sufficient_a(double eps, double n, double delta);

/// Terminal clock value of the lower-bound stopping time.
double s_max(double eta, double n, double eps);

struct ZThreshold {
  /// 2 asinh(sqrt(eta) (e^{-s}/4 - 1/16) e^{(1-eps) s / 2}).
  double threshold;
  /// min(1, log(400/eta) - (1-eps) s).
  double relaxation;
  /// The asinh argument; negative once s > log 4.
  double argument;
};

ZThreshold z_threshold(double s, double eta, double eps);

/// asinh accurate for large-magnitude negative arguments.
double stable_asinh(double x);

}  // namespace pglab::bounds
