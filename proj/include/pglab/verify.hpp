#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pglab::verify {

/// Outcome of one named property check.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  /// Monte Carlo replications for the hitting and lemma checks.
  std::size_t seeds = 10000;
  /// Multiplier on the sample counts of every other check.
  double budget = 1.0;
  unsigned workers = 0;
};

/// Suites: "identities", "lemmas", "hitting", "all". Throws
/// std::invalid_argument for any other name.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const SuiteOptions& opts);
bool is_known_suite(const std::string& suite);

// Individual checks. Every sample count is explicit so callers can pin
// sizes; thresholds are fixed inside each check.

/// Max over samples of |grad - fd|_inf / |grad|_inf with central differences
/// (step 1e-5) of the value function; threshold 1e-6.
CheckResult gradient_vs_finite_differences(std::size_t samples,
                                           std::uint64_t seed);
CheckResult softmax_shift_invariance(std::size_t samples, std::uint64_t seed);
CheckResult gradient_orthogonality(std::size_t samples, std::uint64_t seed);
CheckResult regret_non_negative(std::size_t samples, std::uint64_t seed);

/// Lower-bound coefficient cross-checks on random non-degenerate states.
CheckResult lower_sde_identities(std::size_t samples, std::uint64_t seed);
/// Closed-form vs inner-product drift of Z_a (and unit-noise diffusion).
CheckResult z_coefficient_identities(std::size_t samples, std::uint64_t seed);

CheckResult psi_bound_at_k_log(void);
CheckResult psi_second_derivative(void);
CheckResult psi_shape_and_quadrature(void);
CheckResult lemma_pi_sweep(std::size_t samples, std::uint64_t seed);
CheckResult z_threshold_below_relaxation(void);
CheckResult bounds_monotone(void);

CheckResult discrete_conservation(long steps, std::size_t seeds,
                                  unsigned workers);
CheckResult continuous_conservation(long steps, std::size_t seeds,
                                    unsigned workers);
CheckResult discrete_reproducibility(void);
CheckResult discrete_action_frequencies(std::size_t draws, std::uint64_t seed);
CheckResult euler_weak_order(void);
CheckResult euler_noise_covariance(std::size_t replications,
                                   std::uint64_t seed);

/// Frequency of inf theta_a <= -log(n/delta) for uniform-gap k=5, gap 0.5;
/// passes when it is at most delta + 3 SE.
CheckResult lemma_theta_lower_bound(double eta, std::size_t k, double n,
                                    double delta, double h, std::size_t seeds,
                                    unsigned workers);
/// Frequency of inf Z_a <= -delta2/2 at eta = delta2^2 / (8 log(2n/delta)),
/// uniform-gap instance; passes when at most delta + 3 SE.
CheckResult lemma_z_lower_bound(std::size_t k, double gap, double n,
                                double delta, double h, std::size_t seeds,
                                unsigned workers);

CheckResult drifted_bm_hitting(std::size_t seeds, unsigned workers);
CheckResult drifted_bm_below_bound(std::size_t seeds, unsigned workers);
CheckResult sigmoid_zero_drift_reflection(std::size_t seeds, unsigned workers);
CheckResult sigmoid_strong_drift_no_hits(std::size_t seeds, unsigned workers);

}  // namespace pglab::verify
