#include "pglab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pglab {

namespace {

void require_all_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + " must be finite");
    }
  }
}

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": length " +
                                std::to_string(got) + " does not match k = " +
                                std::to_string(want));
  }
}

}  // namespace

BanditInstance::BanditInstance(std::vector<double> mu,
                               std::vector<double> sigma, Validation mode)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), mode_(mode) {
  if (mu_.size() < 2) throw std::invalid_argument("bandit needs k >= 2 arms");
  require_length(sigma_.size(), mu_.size(), "sigma");
  require_all_finite(mu_, "mu");
  require_all_finite(sigma_, "sigma");
  for (double s : sigma_) {
    if (s < 0.0) throw std::invalid_argument("sigma must be non-negative");
  }
  if (mode_ == Validation::kStandard) {
    if (mu_.front() > 1.0 || mu_.back() < 0.0) {
      throw std::invalid_argument("standard instance needs means in [0, 1]");
    }
    if (!(mu_[0] > mu_[1])) {
      throw std::invalid_argument("standard instance needs mu[0] > mu[1]");
    }
    for (std::size_t a = 2; a < mu_.size(); ++a) {
      if (mu_[a] > mu_[a - 1]) {
        throw std::invalid_argument(
            "standard instance needs non-increasing means");
      }
    }
    if (*std::max_element(sigma_.begin(), sigma_.end()) > 1.0) {
      throw std::invalid_argument("standard instance needs max(sigma) <= 1");
    }
  }
  best_mean_ = *std::max_element(mu_.begin(), mu_.end());
}

PolicyState PolicyState::initial(std::size_t k) {
  return from_theta(std::vector<double>(k, 0.0));
}

PolicyState PolicyState::from_theta(std::vector<double> theta) {
  PolicyState state;
  state.theta = std::move(theta);
  state.pi.resize(state.theta.size());
  state.refresh();
  return state;
}

void PolicyState::refresh() {
  pi.resize(theta.size());
  softmax_into(theta, pi);
}

void softmax_into(std::span<const double> theta, std::span<double> out) {
  require_length(out.size(), theta.size(), "softmax output");
  const double peak = *std::max_element(theta.begin(), theta.end());
  if (!std::isfinite(peak)) {
    require_all_finite(theta, "theta");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < theta.size(); ++a) {
    out[a] = std::exp(theta[a] - peak);
    total += out[a];
  }
  if (!std::isfinite(total)) require_all_finite(theta, "theta");
  const double inv = 1.0 / total;
  for (double& p : out) p *= inv;
}

std::vector<double> softmax(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("softmax of empty vector");
  require_all_finite(theta, "theta");
  std::vector<double> out(theta.size());
  softmax_into(theta, out);
  return out;
}

double value(std::span<const double> theta, const BanditInstance& inst) {
  require_length(theta.size(), inst.k(), "theta");
  const auto pi = softmax(theta);
  return std::inner_product(pi.begin(), pi.end(), inst.mu().begin(), 0.0);
}

std::vector<double> policy_gradient_from_pi(std::span<const double> pi,
                                            std::span<const double> mu) {
  require_length(mu.size(), pi.size(), "mu");
  const double mean = std::inner_product(pi.begin(), pi.end(), mu.begin(), 0.0);
  std::vector<double> grad(pi.size());
  for (std::size_t a = 0; a < pi.size(); ++a) grad[a] = pi[a] * (mu[a] - mean);
  return grad;
}

std::vector<double> policy_gradient(std::span<const double> theta,
                                    const BanditInstance& inst) {
  require_length(theta.size(), inst.k(), "theta");
  return policy_gradient_from_pi(softmax(theta), inst.mu());
}

double instant_regret(std::span<const double> pi, const BanditInstance& inst) {
  require_length(pi.size(), inst.k(), "pi");
  // Sum of pi_a * gap_a is exactly non-negative; mu_star - <pi, mu> is not.
  double regret = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) regret += pi[a] * inst.gap(a);
  return regret;
}

double sum(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0);
}

}  // namespace pglab
