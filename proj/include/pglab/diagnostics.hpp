#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pglab/core.hpp"

namespace pglab {

/// Drift and diffusion of the log-odds Z_a = theta_0 - theta_a, a >= 1.
struct ZCoefficients {
  /// eta [pi_a gap_a + (pi_0 - pi_a) R].
  double drift;
  /// eta sqrt(pi_0 + pi_a - (pi_0 - pi_a)^2); the unit-noise closed form.
  double diffusion;
  /// <e_0 - e_a, eta (diag(pi) - pi pi^T) mu>.
  double drift_inner_product;
  /// eta |(e_0 - e_a - (pi_0 - pi_a) 1) * sqrt(pi) * sigma|, using the
  /// instance's own noise. Equals `diffusion` when every sigma is 1.
  double diffusion_direct;
};

ZCoefficients z_coefficients(const PolicyState& state,
                             const BanditInstance& inst, double eta,
                             std::size_t a);

class DegenerateState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficients of the (S, Z) system for the lower-bound family, where
/// S = theta_0 + theta_1, Z = theta_0 - theta_1 and tail mass
/// pi_tail = sum_{a >= 2} pi_a.
struct LowerSdeCoefficients {
  double clock_rate;    // C = eta pi_tail (1 - pi_tail)
  double drift_S;       // [1 - pi_1 delta2 / (1 - pi_tail)] C
  double diffusion_S;   // sqrt(eta pi_tail C)
  double alpha;
  double sigma2;
  double G;             // (1/m) exp((S + Z)/2 + S/m)

  // Independent routes used by the cross-checks.
  double drift_S_direct;      // eta (pi_0 R + pi_1 (R - delta2))
  double diffusion_S_direct;  // eta pi_tail sqrt(1 - pi_tail)
  double tanh_half_Z;         // tanh(Z/2)
  double pi_ratio;            // (pi_0 - pi_1) / (pi_0 + pi_1)
  double drift_Z_direct;      // eta [pi_1 delta2 + (pi_0 - pi_1) R]
  double drift_Z_time_changed;  // [alpha delta2 + tanh(Z/2)] C
  double sigma2_direct;       // Var(dZ) / (eta C dt) from the noise vector
  double G_direct;            // pi_0 / pi_tail

  // Sum of operand magnitudes in the two drift routes; rounding error is
  // measured against these rather than the (possibly cancelled) result.
  double drift_S_scale;
  double drift_Z_scale;
};

/// Throws DegenerateState if pi_tail is 0 or 1 in floating point, and
/// std::invalid_argument if k < 3 or the tail parameters are not all equal.
LowerSdeCoefficients lower_sde_coefficients(const PolicyState& state,
                                            const BanditInstance& inst,
                                            double eta);

/// Clock rate C = eta pi_tail (1 - pi_tail) and G = pi_0 / pi_tail in the
/// exponential form, without validation. Used on every monitored step.
struct ClockSample {
  double clock_rate;
  double G;
};
ClockSample lower_bound_clock(const PolicyState& state, double eta);

struct IdentityCheck {
  std::string name;
  double lhs;
  double rhs;
  bool is_inequality;  // lhs <= rhs
  bool passed;
};

/// Runs every algebraic cross-check on a coefficient set. Equalities use
/// relative tolerance `tol`; inequalities are checked exactly.
std::vector<IdentityCheck> cross_checks(const LowerSdeCoefficients& c,
                                        double tol = 1e-12);

bool approx_equal(double a, double b, double rel_tol);

enum class StopCondition { kHorizon = 1, kSWindow = 2, kZThreshold = 3, kClockMax = 4 };

struct StopEvent {
  StopCondition condition;
  double time;
  double s;
  bool operator==(const StopEvent&) const = default;
};

/// Tracks the stopping conditions of the lower-bound construction along one
/// trajectory. Requires k >= 5 so that eps = 2/(k-2) < 1.
class LowerBoundMonitor {
 public:
  LowerBoundMonitor(std::size_t k, double eta, double n, double delta2);

  int m() const { return m_; }
  double eps() const { return eps_; }
  double s_max() const { return s_max_; }
  double eta() const { return eta_; }
  double delta2() const { return delta2_; }

  /// First stopping condition that holds for (S, Z, s), checked in the
  /// order S-window, Z-threshold, clock limit.
  std::optional<StopCondition> check(double S, double Z, double s) const;

  /// Records one grid point. Returns true if this call recorded the first
  /// firing.
  bool observe(double t, double S, double Z, double s, double G);
  /// Marks the horizon as reached when nothing fired earlier.
  void finish(double t, double s);

  const std::optional<StopEvent>& first_fire() const { return first_fire_; }
  /// Grid points before the first firing where Z exceeded
  /// min(1, log(400/eta) - (1-eps) s). Always zero for a correct monitor.
  long z_relaxation_violations() const { return z_violations_; }
  /// Pre-stop grid points where G exceeded (8/m) e^{s/2}, resp. 200/(m sqrt(eta)).
  long g_exp_bound_exceeded() const { return g1_exceeded_; }
  long g_const_bound_exceeded() const { return g2_exceeded_; }
  double max_G_before_stop() const { return max_G_; }

 private:
  int m_;
  double eps_;
  double eta_;
  double delta2_;
  double s_max_;
  std::optional<StopEvent> first_fire_;
  long z_violations_ = 0;
  long g1_exceeded_ = 0;
  long g2_exceeded_ = 0;
  double max_G_ = 0.0;
};

std::optional<StopCondition> check_def_tau(double S, double Z, double s,
                                           const LowerBoundMonitor& monitor);

/// Parameters of the logarithmic potential used in the k-armed upper bound.
struct PsiParams {
  int k;
  double n;
  double delta;

  PsiParams(int k, double n, double delta);
  /// log(n / delta).
  double log_ratio() const;
};

/// 6 k L log((u + 1 + L) / (1 + L)) with L = log(n/delta). Throws
/// std::domain_error for u <= -L - 1.
double psi(double u, const PsiParams& p);
double psi_prime(double u, const PsiParams& p);
double psi_second(double u, const PsiParams& p);

struct LemmaPiCheck {
  bool applicable;
  bool holds;
  double lhs;  // 1 / pi_0
  double rhs;  // 6 k L / (theta_0 + 1 + L)
};

/// Evaluates the 1/pi_0 bound and whether its preconditions apply to theta:
/// zero-sum within 1e-8, every entry in [-L, k L], theta_0 >= max theta - 1.
LemmaPiCheck check_lemma_pi(std::span<const double> theta, const PsiParams& p);

}  // namespace pglab
