#include "pglab/discrete.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace pglab {

std::size_t sample_action(std::span<const double> pi, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] <= 0.0) continue;
    cumulative += pi[a];
    last_positive = a;
    if (u < cumulative) return a;
  }
  // u landed in the rounding gap above sum(pi).
  return last_positive;
}

void apply_discrete_update(PolicyState& state, std::size_t action,
                           double reward, double eta) {
  const double scale = eta * reward;
  for (std::size_t a = 0; a < state.theta.size(); ++a) {
    const double indicator = a == action ? 1.0 : 0.0;
    state.theta[a] += scale * (indicator - state.pi[a]);
  }
  if (detail::all_finite(state.theta)) state.refresh();
}

namespace {

struct Draw {
  std::size_t action;
  double reward;
};

Draw draw_round(const PolicyState& state, const BanditInstance& inst,
                RandomStream& rng) {
  const std::size_t action = sample_action(state.pi, rng.uniform());
  const double noise = rng.gaussian();
  return {action, inst.mu(action) + inst.sigma(action) * noise};
}

}  // namespace

DiscreteStepRecord step_discrete(PolicyState& state, const BanditInstance& inst,
                                 double eta, RandomStream& rng) {
  const Draw d = draw_round(state, inst, rng);
  const double increment = inst.gap(d.action);
  state.pseudo_regret += instant_regret(state.pi, inst);
  state.cum_regret += increment;
  apply_discrete_update(state, d.action, d.reward, eta);
  state.t += 1.0;
  return {static_cast<long>(state.t), d.action, d.reward, state.theta,
          increment};
}

RunResult run_discrete(const BanditInstance& inst, double eta, long n,
                       std::uint64_t seed, long stride,
                       const MonitorOptions& monitors) {
  if (n < 1) throw std::invalid_argument("run_discrete needs n >= 1");
  if (stride < 1) throw std::invalid_argument("record stride must be >= 1");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }

  RandomStream rng(seed, stream_tag::kDiscrete);
  PolicyState state = PolicyState::initial(inst.k());
  RunResult out;
  out.trajectory.record(state);
  detail::RunningMinima minima;

  std::optional<LowerBoundMonitor> monitor;
  if (monitors.lower_bound) {
    monitor.emplace(inst.k(), eta, static_cast<double>(n), inst.delta2());
  }

  bool diverged = false;
  long round = 0;
  while (round < n) {
    if (monitor) {
      const auto coeffs = lower_bound_clock(state, eta);
      const double S = state.theta[0] + state.theta[1];
      const double Z = state.theta[0] - state.theta[1];
      if (monitor->observe(state.t, S, Z, state.clock_s, coeffs.G)) {
        out.trajectory.stop_events.push_back(*monitor->first_fire());
        if (monitors.halt_on_stop) break;
      }
      state.clock_s += coeffs.clock_rate;
    }
    const Draw d = draw_round(state, inst, rng);
    state.pseudo_regret += instant_regret(state.pi, inst);
    state.cum_regret += inst.gap(d.action);
    apply_discrete_update(state, d.action, d.reward, eta);
    state.t += 1.0;
    ++round;
    if (!detail::all_finite(state.theta)) {
      diverged = true;
      break;
    }
    minima.observe(state.theta);
    if (round % stride == 0 || round == n) out.trajectory.record(state);
  }
  if (monitor && !diverged) {
    if (!monitor->first_fire()) {
      monitor->finish(state.t, state.clock_s);
      out.trajectory.stop_events.push_back(*monitor->first_fire());
    }
  }

  if (out.trajectory.times.back() != state.t && !diverged) {
    out.trajectory.record(state);
  }

  RunSummary& s = out.summary;
  s.seed = seed;
  s.eta = eta;
  s.engine = Engine::kDiscrete;
  s.k = inst.k();
  s.delta2 = inst.delta2();
  s.n = static_cast<double>(n);
  s.h = 1.0;
  s.final_pi1 = state.pi[0];
  s.regret = state.cum_regret;
  s.pseudo_regret = state.pseudo_regret;
  s.diverged = diverged;
  if (monitor) {
    s.tau = monitor->first_fire();
    s.z_relaxation_violations = monitor->z_relaxation_violations();
  }
  s.min_Z = minima.min_Z;
  s.min_theta = minima.min_theta;
  out.final_state = std::move(state);
  return out;
}

}  // namespace pglab
