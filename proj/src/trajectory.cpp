#include "pglab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pglab {

std::string to_string(Engine engine) {
  return engine == Engine::kDiscrete ? "discrete" : "continuous";
}

Engine parse_engine(const std::string& name) {
  if (name == "discrete") return Engine::kDiscrete;
  if (name == "continuous") return Engine::kContinuous;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

void Trajectory::record(const PolicyState& state) {
  const auto& theta = state.theta;
  times.push_back(state.t);
  pi1.push_back(state.pi[0]);
  std::vector<double> z(theta.size() - 1);
  double zmin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 1; a < theta.size(); ++a) {
    z[a - 1] = theta[0] - theta[a];
    zmin = std::min(zmin, z[a - 1]);
  }
  Z.push_back(std::move(z));
  Z_min.push_back(zmin);
  S.push_back(theta[0] + theta[1]);
  clock_s.push_back(state.clock_s);
  regret.push_back(state.cum_regret);
}

namespace detail {

void RunningMinima::observe(const std::vector<double>& theta) {
  const double top = theta[0];
  for (std::size_t a = 1; a < theta.size(); ++a) {
    min_Z = std::min(min_Z, top - theta[a]);
  }
  for (double v : theta) min_theta = std::min(min_theta, v);
}

bool all_finite(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

}  // namespace pglab
