#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pglab/core.hpp"
#include "pglab/random.hpp"
#include "pglab/trajectory.hpp"

namespace pglab {

struct DiscreteStepRecord {
  long round;
  std::size_t action;
  double reward;
  std::vector<double> theta_after;
  /// Gap of the played arm, mu_star - mu_action.
  double regret_increment;
};

/// Inverse-CDF draw of an arm from pi using the uniform u in [0, 1).
std::size_t sample_action(std::span<const double> pi, double u);

/// theta += eta (e_action - pi) reward, then refreshes pi. Does not advance
/// time or regret.
void apply_discrete_update(PolicyState& state, std::size_t action,
                           double reward, double eta);

/// One round of softmax policy gradient. Draws one uniform (the action)
/// followed by one Gaussian (the reward noise) from rng.
DiscreteStepRecord step_discrete(PolicyState& state, const BanditInstance& inst,
                                 double eta, RandomStream& rng);

/// Runs n rounds from theta = 0. The trajectory holds round 0, every
/// stride-th round and the final round.
RunResult run_discrete(const BanditInstance& inst, double eta, long n,
                       std::uint64_t seed, long stride,
                       const MonitorOptions& monitors = {});

}  // namespace pglab
