#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "pglab/core.hpp"
#include "pglab/random.hpp"

using namespace pglab;

namespace {

// Softmax in long double without max-subtraction; only for moderate inputs.
std::vector<double> naive_softmax(const std::vector<double>& theta) {
  long double z = 0.0L;
  for (double t : theta) z += std::exp(static_cast<long double>(t));
  std::vector<double> out;
  for (double t : theta) out.push_back(static_cast<double>(std::exp(static_cast<long double>(t)) / z));
  return out;
}

// (diag(pi) - pi pi^T) mu as an explicit matrix-vector product.
std::vector<double> matrix_gradient(const std::vector<double>& pi,
                                    const std::vector<double>& mu) {
  const std::size_t k = pi.size();
  std::vector<double> g(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double m = (i == j ? pi[i] : 0.0) - pi[i] * pi[j];
      g[i] += m * mu[j];
    }
  }
  return g;
}

}  // namespace

TEST_CASE("softmax matches a direct evaluation") {
  RandomStream rng(3, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = 2 + rep % 7;
    std::vector<double> theta(k);
    for (double& t : theta) t = 10.0 * rng.uniform() - 5.0;
    const auto p = softmax(theta);
    const auto q = naive_softmax(theta);
    for (std::size_t a = 0; a < k; ++a) CHECK(p[a] == doctest::Approx(q[a]).epsilon(1e-13));
  }
}

TEST_CASE("softmax edge cases") {
  const auto uniform = softmax(std::vector<double>{0.0, 0.0});
  CHECK(uniform[0] == 0.5);
  CHECK(uniform[1] == 0.5);

  const auto big = softmax(std::vector<double>{1000.0, 0.0, -1000.0});
  CHECK(big[0] == 1.0);
  CHECK(big[1] == doctest::Approx(std::exp(-1000.0)));
  CHECK(std::isfinite(big[2]));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(softmax(std::vector<double>{0.0, nan}), std::invalid_argument);
  CHECK_THROWS_AS(softmax(std::vector<double>{0.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("value, gradient and regret against explicit formulas") {
  const BanditInstance inst({1.0, 0.8, 0.3}, {1.0, 1.0, 0.5});
  const std::vector<double> theta{0.2, -0.4, 0.7};
  const auto pi = naive_softmax(theta);
  const double v = pi[0] * 1.0 + pi[1] * 0.8 + pi[2] * 0.3;
  CHECK(value(theta, inst) == doctest::Approx(v).epsilon(1e-14));

  const auto g = policy_gradient(theta, inst);
  const auto expected = matrix_gradient(pi, {1.0, 0.8, 0.3});
  for (std::size_t a = 0; a < 3; ++a) CHECK(g[a] == doctest::Approx(expected[a]).epsilon(1e-13));
  CHECK(std::fabs(sum(g)) < 1e-15);

  CHECK(instant_regret(pi, inst) == doctest::Approx(1.0 - v).epsilon(1e-13));
}

TEST_CASE("gradient at the uniform policy") {
  // pi = 1/2: gradient = (1/4)(mu_0 - mu_1, mu_1 - mu_0).
  const BanditInstance inst({1.0, 0.0}, {1.0, 1.0});
  const auto g = policy_gradient(std::vector<double>{0.0, 0.0}, inst);
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(-0.25));
}

TEST_CASE("bandit instance validation") {
  CHECK_NOTHROW(BanditInstance({1.0, 0.5, 0.5}, {1.0, 1.0, 0.0}));
  CHECK_THROWS_AS(BanditInstance({0.5, 1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance({1.0, 0.5}, {1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance({1.0, 0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);

  const BanditInstance loose({0.2, 3.0}, {2.0, 0.0}, Validation::kPermissive);
  CHECK(loose.best_mean() == 3.0);
  CHECK(loose.gap(0) == doctest::Approx(2.8));
  CHECK(loose.gap(1) == 0.0);
  CHECK_THROWS_AS(BanditInstance({0.2, NAN}, {1.0, 1.0}, Validation::kPermissive),
                  std::invalid_argument);

  const BanditInstance inst({1.0, 0.9, 0.0}, {1.0, 1.0, 0.0});
  CHECK(inst.delta2() == doctest::Approx(0.1));
  CHECK(inst.gap(2) == 1.0);
}

TEST_CASE("policy state") {
  const auto s = PolicyState::initial(4);
  CHECK(s.theta == std::vector<double>(4, 0.0));
  for (double p : s.pi) CHECK(p == 0.25);
  CHECK(s.t == 0.0);

  auto r = PolicyState::from_theta({1.0, -1.0});
  CHECK(r.pi[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  r.theta = {0.0, 0.0};
  r.refresh();
  CHECK(r.pi[0] == 0.5);
}

TEST_CASE("regret is non-negative on standard instances") {
  RandomStream rng(11, 0);
  const BanditInstance inst({1.0, 0.9, 0.9, 0.2}, {1.0, 1.0, 1.0, 1.0});
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> theta(4);
    for (double& t : theta) t = 40.0 * rng.uniform() - 20.0;
    CHECK(instant_regret(softmax(theta), inst) >= 0.0);
  }
}
