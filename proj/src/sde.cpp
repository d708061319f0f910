#include "pglab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pglab/diagnostics.hpp"

namespace pglab {

void SdeConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("step size h must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (h > horizon) throw std::invalid_argument("step size exceeds horizon");
  if (record_stride < 1) throw std::invalid_argument("record stride must be >= 1");
  if (!(clamp_floor >= 0.0)) throw std::invalid_argument("clamp floor must be >= 0");
}

double default_step(double eta) {
  if (!(eta > 0.0)) return 0.01;
  return std::min(0.01, 0.0025 / (eta * eta));
}

namespace {

template <typename Noise>
void euler_step(PolicyState& state, const BanditInstance& inst, double eta,
                double h, Noise&& noise, double clamp_floor,
                bool track_clock) {
  const std::size_t k = inst.k();
  const double root_h = std::sqrt(h);
  const auto mu = inst.mu();
  const auto sigma = inst.sigma();
  auto& pi = state.pi;

  // Left-endpoint integrals.
  state.cum_regret += instant_regret(pi, inst) * h;
  state.pseudo_regret = state.cum_regret;
  if (track_clock) state.clock_s += lower_bound_clock(state, eta).clock_rate * h;

  // dX = diag(pi) mu h + diag(sqrt(pi)) sigma sqrt(h) xi, then
  // dtheta = eta (Id - pi 1^T) dX.
  double dx_total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const double root_pi = std::sqrt(std::max(pi[a], clamp_floor));
    const double dx = pi[a] * mu[a] * h + root_pi * sigma[a] * root_h * noise(a);
    dx_total += dx;
    state.theta[a] += eta * dx;
  }
  for (std::size_t a = 0; a < k; ++a) state.theta[a] -= eta * pi[a] * dx_total;
  state.t += h;
  if (detail::all_finite(state.theta)) state.refresh();
}

}  // namespace

void step_euler_with_noise(PolicyState& state, const BanditInstance& inst,
                           double eta, double h, std::span<const double> noise,
                           double clamp_floor, bool track_clock) {
  if (noise.size() != inst.k()) {
    throw std::invalid_argument("noise vector length differs from k");
  }
  euler_step(state, inst, eta, h, [noise](std::size_t a) { return noise[a]; },
             clamp_floor, track_clock);
}

void step_euler(PolicyState& state, const BanditInstance& inst, double eta,
                double h, RandomStream& rng, double clamp_floor,
                bool track_clock) {
  euler_step(state, inst, eta, h, [&rng](std::size_t) { return rng.gaussian(); },
             clamp_floor, track_clock);
}

RunResult run_continuous(const BanditInstance& inst, double eta,
                         const SdeConfig& cfg, std::uint64_t seed,
                         const MonitorOptions& monitors) {
  cfg.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  const long steps =
      std::max(1L, static_cast<long>(std::ceil(cfg.horizon / cfg.h - 1e-9)));

  RandomStream rng(seed, stream_tag::kContinuous);
  PolicyState state = PolicyState::initial(inst.k());
  RunResult out;
  out.trajectory.record(state);
  detail::RunningMinima minima;

  std::optional<LowerBoundMonitor> monitor;
  if (monitors.lower_bound) {
    monitor.emplace(inst.k(), eta, cfg.horizon, inst.delta2());
  }

  bool diverged = false;
  for (long i = 0; i < steps; ++i) {
    const ClockSample clock =
        monitor ? lower_bound_clock(state, eta) : ClockSample{0.0, 0.0};
    if (monitor) {
      const double S = state.theta[0] + state.theta[1];
      const double Z = state.theta[0] - state.theta[1];
      if (monitor->observe(state.t, S, Z, state.clock_s, clock.G)) {
        out.trajectory.stop_events.push_back(*monitor->first_fire());
        if (monitors.halt_on_stop) break;
      }
    }
    const double h = i + 1 < steps ? cfg.h : cfg.horizon - cfg.h * (steps - 1);
    step_euler(state, inst, eta, h, rng, cfg.clamp_floor, monitor.has_value());
    if (!detail::all_finite(state.theta)) {
      diverged = true;
      break;
    }
    minima.observe(state.theta);
    if ((i + 1) % cfg.record_stride == 0 || i + 1 == steps) {
      out.trajectory.record(state);
    }
  }
  if (monitor && !diverged && !monitor->first_fire()) {
    monitor->finish(state.t, state.clock_s);
    out.trajectory.stop_events.push_back(*monitor->first_fire());
  }
  if (!diverged && out.trajectory.times.back() != state.t) {
    out.trajectory.record(state);
  }

  RunSummary& s = out.summary;
  s.seed = seed;
  s.eta = eta;
  s.engine = Engine::kContinuous;
  s.k = inst.k();
  s.delta2 = inst.delta2();
  s.n = cfg.horizon;
  s.h = cfg.h;
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

double sigmoid_drift(double a, double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return a * e / (1.0 + e);
  }
  return a / (std::exp(x) + 1.0);
}

namespace {

template <typename Drift>
HittingSample simulate_scalar(Drift drift, double eps, double horizon,
                              double h, std::uint64_t seed) {
  if (!(h > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("scalar SDE needs h > 0 and horizon > 0");
  }
  RandomStream rng(seed, stream_tag::kScalarSde);
  const long steps =
      std::max(1L, static_cast<long>(std::ceil(horizon / h - 1e-9)));
  double x = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (long i = 0; i < steps; ++i) {
    const double dt = i + 1 < steps ? h : horizon - h * (steps - 1);
    x += drift(x) * dt + std::sqrt(dt) * rng.gaussian();
    lowest = std::min(lowest, x);
  }
  return {lowest, lowest <= -eps};
}

}  // namespace

HittingSample simulate_drifted_bm(double a, double eps, double horizon,
                                  double h, std::uint64_t seed) {
  return simulate_scalar([a](double) { return a; }, eps, horizon, h, seed);
}

HittingSample simulate_sigmoid_drift_sde(double a, double eps, double horizon,
                                         double h, std::uint64_t seed) {
  return simulate_scalar([a](double x) { return sigmoid_drift(a, x); }, eps,
                         horizon, h, seed);
}

}  // namespace pglab
