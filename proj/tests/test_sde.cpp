#include <cmath>
#include <vector>

#include "doctest.h"
#include "pglab/core.hpp"
#include "pglab/experiments.hpp"
#include "pglab/sde.hpp"

using namespace pglab;

TEST_CASE("Euler step matches the hand-written update") {
  const BanditInstance inst({1.0, 0.7, 0.2}, {1.0, 0.5, 0.3});
  PolicyState s = PolicyState::from_theta({0.4, -0.1, -0.3});
  const auto pi = s.pi;
  const std::vector<double> xi{0.3, -1.2, 0.8};
  const double eta = 0.3, h = 0.02;
  step_euler_with_noise(s, inst, eta, h, xi);

  std::vector<double> dX(3);
  double total = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    dX[a] = pi[a] * inst.mu(a) * h + std::sqrt(pi[a]) * inst.sigma(a) * std::sqrt(h) * xi[a];
    total += dX[a];
  }
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(s.theta[a] == doctest::Approx(0.4 * (a == 0) - 0.1 * (a == 1) - 0.3 * (a == 2) +
                                        eta * (dX[a] - pi[a] * total))
                            .epsilon(1e-14));
  }
  const double regret = pi[1] * 0.3 + pi[2] * 0.8;
  CHECK(s.cum_regret == doctest::Approx(h * regret));
  CHECK(s.t == doctest::Approx(h));
  CHECK_THROWS_AS(step_euler_with_noise(s, inst, eta, h, std::vector<double>{0.0}),
                  std::invalid_argument);
}

TEST_CASE("default step keeps eta sqrt(h) small") {
  CHECK(default_step(0.05) == 0.01);
  CHECK(default_step(1.0) == doctest::Approx(0.0025));
  for (double eta : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
    CHECK(eta * std::sqrt(default_step(eta)) <= 0.05 + 1e-15);
  }
}

TEST_CASE("config validation") {
  SdeConfig c;
  CHECK_NOTHROW(c.validate());
  c.h = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.h = 2.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.h = 0.1;
  c.record_stride = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("horizon that is not a multiple of h") {
  const auto inst = two_arm_instance(0.1);
  SdeConfig c;
  c.h = 0.01;
  c.horizon = 1.005;
  c.record_stride = 10;
  const auto r = run_continuous(inst, 0.2, c, 1);
  CHECK(r.final_state.t == doctest::Approx(1.005).epsilon(1e-12));
  CHECK(r.trajectory.times.back() == doctest::Approx(1.005).epsilon(1e-12));
  CHECK(r.trajectory.size() == 12);
}

TEST_CASE("noiseless flow matches an independent RK4 solution") {
  // Two arms, sigma = 0: Z' = 2 eta delta pi (1 - pi), pi = 1 / (1 + e^{-Z}).
  const BanditInstance inst({1.0, 0.6}, {0.0, 0.0});
  const double eta = 1.0, delta = 0.4, T = 5.0;
  auto f = [&](double z) {
    const double p = 1.0 / (1.0 + std::exp(-z));
    return 2.0 * eta * delta * p * (1.0 - p);
  };
  double z = 0.0;
  const double dt = 1e-3;
  for (int i = 0; i < 5000; ++i) {
    const double k1 = f(z), k2 = f(z + dt / 2 * k1), k3 = f(z + dt / 2 * k2), k4 = f(z + dt * k3);
    z += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  SdeConfig c;
  c.h = 1e-4;
  c.horizon = T;
  c.record_stride = 1000000;
  const auto r = run_continuous(inst, eta, c, 0);
  const double zhat = r.final_state.theta[0] - r.final_state.theta[1];
  CHECK(zhat == doctest::Approx(z).epsilon(1e-4));
}

TEST_CASE("continuous runs conserve sum theta and are deterministic") {
  const auto inst = uniform_gap_instance(5, 0.5);
  SdeConfig c;
  c.h = 0.01;
  c.horizon = 200.0;
  c.record_stride = 100;
  const auto a = run_continuous(inst, 0.5, c, 3);
  const auto b = run_continuous(inst, 0.5, c, 3);
  CHECK(a.trajectory == b.trajectory);
  CHECK(std::fabs(sum(a.final_state.theta)) < 1e-10);
  CHECK(a.summary.pseudo_regret == a.summary.regret);
  CHECK(a.summary.regret > 0.0);
  CHECK(a.summary.min_Z <= 0.0);
}

TEST_CASE("continuous lower-bound monitor") {
  const auto inst = lower_bound_instance(10, 0.01);
  SdeConfig c;
  c.h = 0.01;
  c.horizon = 2000.0;
  c.record_stride = 1000;
  MonitorOptions m;
  m.lower_bound = true;
  m.halt_on_stop = true;
  const auto r = run_continuous(inst, 0.05, c, 5, m);
  REQUIRE(r.summary.tau.has_value());
  CHECK(r.summary.z_relaxation_violations == 0);
  // halting stops the clock at the firing point
  CHECK(r.final_state.t == doctest::Approx(r.summary.tau->time).epsilon(1e-9));
}

TEST_CASE("scalar hitting simulators") {
  const auto far = simulate_drifted_bm(0.0, 1e6, 1.0, 1e-3, 1);
  CHECK_FALSE(far.hit);
  CHECK(far.min_value > -1e6);
  const auto a = simulate_sigmoid_drift_sde(1.0, 1.0, 2.0, 1e-3, 4);
  const auto b = simulate_sigmoid_drift_sde(1.0, 1.0, 2.0, 1e-3, 4);
  CHECK(a.min_value == b.min_value);
  CHECK(a.hit == (a.min_value <= -1.0));
  // Zero drift: both simulators see the same Brownian path.
  const auto c = simulate_drifted_bm(0.0, 1.0, 2.0, 1e-3, 4);
  const auto d = simulate_sigmoid_drift_sde(0.0, 1.0, 2.0, 1e-3, 4);
  CHECK(c.min_value == d.min_value);
}

TEST_CASE("sigmoid drift is overflow-safe") {
  CHECK(sigmoid_drift(2.0, 0.0) == 1.0);
  CHECK(sigmoid_drift(2.0, 1000.0) == doctest::Approx(0.0));
  CHECK(sigmoid_drift(2.0, -1000.0) == 2.0);
  CHECK(sigmoid_drift(3.0, 1.0) == doctest::Approx(3.0 / (std::exp(1.0) + 1.0)));
}
