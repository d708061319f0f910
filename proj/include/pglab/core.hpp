#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pglab {

// Arms are zero-indexed throughout: arm 0 is the optimal arm of a
// standard instance, arm 1 the runner-up.

enum class Validation {
  /// 1 >= mu[0] > mu[1] >= ... >= mu[k-1] >= 0 and max(sigma) <= 1.
  kStandard,
  /// Finite entries only; the best arm is whichever has the largest mean.
  kPermissive,
};

/// Gaussian k-armed bandit with known means and per-arm noise scales.
class BanditInstance {
 public:
  BanditInstance(std::vector<double> mu, std::vector<double> sigma,
                 Validation mode = Validation::kStandard);

  std::size_t k() const { return mu_.size(); }
  std::span<const double> mu() const { return mu_; }
  std::span<const double> sigma() const { return sigma_; }
  double mu(std::size_t a) const { return mu_[a]; }
  double sigma(std::size_t a) const { return sigma_[a]; }
  Validation validation() const { return mode_; }

  double best_mean() const { return best_mean_; }
  /// Suboptimality gap of arm a relative to the best mean.
  double gap(std::size_t a) const { return best_mean_ - mu_[a]; }
  /// Gap between the first and second arm, mu[0] - mu[1].
  double delta2() const { return mu_[0] - mu_[1]; }

 private:
  std::vector<double> mu_;
  std::vector<double> sigma_;
  Validation mode_;
  double best_mean_;
};

/// Learner state shared by the discrete and continuous engines.
struct PolicyState {
  double t = 0.0;
  std::vector<double> theta;
  std::vector<double> pi;
  double cum_regret = 0.0;
  double pseudo_regret = 0.0;
  /// Time-changed clock used by the lower-bound monitor.
  double clock_s = 0.0;

  /// theta = 0, uniform policy.
  static PolicyState initial(std::size_t k);
  static PolicyState from_theta(std::vector<double> theta);
  /// Recomputes pi from theta.
  void refresh();
};

std::vector<double> softmax(std::span<const double> theta);
/// Writes softmax(theta) into out; out.size() must equal theta.size().
void softmax_into(std::span<const double> theta, std::span<double> out);

double value(std::span<const double> theta, const BanditInstance& inst);

/// Exact gradient of the value function: (diag(pi) - pi pi^T) mu.
std::vector<double> policy_gradient(std::span<const double> theta,
                                    const BanditInstance& inst);

/// Gradient from an already computed policy.
std::vector<double> policy_gradient_from_pi(std::span<const double> pi,
                                            std::span<const double> mu);

double instant_regret(std::span<const double> pi, const BanditInstance& inst);

double sum(std::span<const double> x);

}  // namespace pglab
