#include <cmath>
#include <vector>

#include "doctest.h"
#include "pglab/core.hpp"
#include "pglab/discrete.hpp"
#include "pglab/experiments.hpp"
#include "pglab/random.hpp"

using namespace pglab;

TEST_CASE("inverse-CDF action sampling") {
  const std::vector<double> pi{0.2, 0.3, 0.5};
  CHECK(sample_action(pi, 0.0) == 0);
  CHECK(sample_action(pi, 0.1999) == 0);
  CHECK(sample_action(pi, 0.2) == 1);
  CHECK(sample_action(pi, 0.4999) == 1);
  CHECK(sample_action(pi, 0.5) == 2);
  CHECK(sample_action(pi, 0.99999) == 2);
  // Zero-mass arms are never returned, even from the rounding gap.
  CHECK(sample_action(std::vector<double>{0.5, 0.5, 0.0}, 0.9999999999999999) == 1);
}

TEST_CASE("update rule theta += eta (e_A - pi) Y") {
  PolicyState s = PolicyState::initial(3);
  apply_discrete_update(s, 1, 2.0, 0.1);
  CHECK(s.theta[0] == doctest::Approx(-0.2 / 3.0));
  CHECK(s.theta[1] == doctest::Approx(0.2 * 2.0 / 3.0));
  CHECK(s.theta[2] == doctest::Approx(-0.2 / 3.0));
  CHECK(std::fabs(sum(s.theta)) < 1e-16);
  CHECK(s.pi == softmax(s.theta));
}

TEST_CASE("one round draws a uniform then a gaussian") {
  const BanditInstance inst({1.0, 0.6, 0.1}, {1.0, 0.5, 0.25});
  PolicyState s = PolicyState::from_theta({0.3, -0.1, -0.2});
  const auto pi_before = s.pi;
  RandomStream rng(9, 77);
  RandomStream mirror(9, 77);
  const auto rec = step_discrete(s, inst, 0.2, rng);

  const std::size_t action = sample_action(pi_before, mirror.uniform());
  const double reward = inst.mu(action) + inst.sigma(action) * mirror.gaussian();
  CHECK(rec.action == action);
  CHECK(rec.reward == reward);
  CHECK(rec.regret_increment == inst.gap(action));
  CHECK(s.t == 1.0);
  CHECK(s.cum_regret == inst.gap(action));
  CHECK(s.pseudo_regret == doctest::Approx(instant_regret(pi_before, inst)));
}

TEST_CASE("single round regret is a gap of the lower-bound instance") {
  const auto inst = lower_bound_instance(5, 0.002);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = run_discrete(inst, 0.1, 1, seed, 1);
    const double reg = r.summary.regret;
    CHECK((reg == 0.0 || reg == doctest::Approx(0.002) || reg == 1.0));
  }
}

TEST_CASE("zero learning rate leaves theta at zero") {
  const auto inst = uniform_gap_instance(4, 0.3);
  const auto r = run_discrete(inst, 0.0, 1000, 3, 100);
  CHECK(r.final_state.theta == std::vector<double>(4, 0.0));
  CHECK(r.summary.pseudo_regret == doctest::Approx(1000 * 0.75 * 0.3));
  CHECK(r.trajectory.size() == 11);
  CHECK(r.trajectory.times.front() == 0.0);
  CHECK(r.trajectory.times.back() == 1000.0);
}

TEST_CASE("recording includes the final round") {
  const auto inst = two_arm_instance(0.1);
  const auto r = run_discrete(inst, 0.1, 105, 1, 10);
  CHECK(r.trajectory.size() == 12);
  CHECK(r.trajectory.times.back() == 105.0);
}

TEST_CASE("runs are deterministic and conserve sum theta") {
  const auto inst = uniform_gap_instance(6, 0.2);
  const auto a = run_discrete(inst, 0.3, 20000, 4, 50);
  const auto b = run_discrete(inst, 0.3, 20000, 4, 50);
  CHECK(a.trajectory == b.trajectory);
  CHECK(a.final_state.theta == b.final_state.theta);
  CHECK(std::fabs(sum(a.final_state.theta)) < 1e-10);
  CHECK(a.summary.regret >= 0.0);
  CHECK(a.summary.min_theta <= 0.0);
}

TEST_CASE("common random numbers across learning rates") {
  // At theta = 0 the policy does not depend on eta, so the first action does not either.
  const auto inst = uniform_gap_instance(5, 0.2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = run_discrete(inst, 0.01, 1, seed, 1);
    const auto b = run_discrete(inst, 0.5, 1, seed, 1);
    CHECK(a.summary.regret == b.summary.regret);
  }
}

TEST_CASE("argument checks") {
  const auto inst = two_arm_instance(0.1);
  CHECK_THROWS_AS(run_discrete(inst, -0.1, 10, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_discrete(inst, 0.1, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_discrete(inst, 0.1, 10, 0, 0), std::invalid_argument);
}

TEST_CASE("lower-bound monitor on the discrete engine") {
  const auto inst = lower_bound_instance(8, 0.01);
  MonitorOptions m;
  m.lower_bound = true;
  const auto r = run_discrete(inst, 0.05, 3000, 2, 100, m);
  REQUIRE(r.summary.tau.has_value());
  CHECK(r.trajectory.stop_events.size() == 1);
  CHECK(r.summary.z_relaxation_violations == 0);
  CHECK(r.trajectory.clock_s.back() > 0.0);
}
