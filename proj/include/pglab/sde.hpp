#pragma once

#include <cstdint>
#include <span>

#include "pglab/core.hpp"
#include "pglab/random.hpp"
#include "pglab/trajectory.hpp"

namespace pglab {

struct SdeConfig {
  double h = 0.01;
  double horizon = 1.0;
  long record_stride = 1;
  /// Lower clamp applied to pi only under square roots.
  double clamp_floor = 0.0;

  /// Throws std::invalid_argument unless 0 < h <= horizon and stride >= 1.
  void validate() const;
};

/// Step size keeping the per-step parameter noise eta sqrt(h) <= 0.05,
/// capped at 0.01.
double default_step(double eta);

/// One Euler-Maruyama step of the continuous policy gradient using the
/// standard Gaussians in `noise` (length k). Advances t, regret and, when
/// track_clock is set, the lower-bound clock, all at the left endpoint.
void step_euler_with_noise(PolicyState& state, const BanditInstance& inst,
                           double eta, double h, std::span<const double> noise,
                           double clamp_floor = 0.0, bool track_clock = false);

/// As above with k fresh Gaussians from rng.
void step_euler(PolicyState& state, const BanditInstance& inst, double eta,
                double h, RandomStream& rng, double clamp_floor = 0.0,
                bool track_clock = false);

/// Integrates from theta = 0 to cfg.horizon. Stop conditions are recorded
/// at the grid point where they first hold.
RunResult run_continuous(const BanditInstance& inst, double eta,
                         const SdeConfig& cfg, std::uint64_t seed,
                         const MonitorOptions& monitors = {});

struct HittingSample {
  double min_value;
  bool hit;
};

/// Euler path of dX = a dt + dB from X_0 = 0. min_value is the minimum over
/// the grid points after time 0; hit means min_value <= -eps.
HittingSample simulate_drifted_bm(double a, double eps, double horizon,
                                  double h, std::uint64_t seed);

/// Euler path of dX = a / (e^X + 1) dt + dB from X_0 = 0, drift evaluated at
/// the left endpoint.
HittingSample simulate_sigmoid_drift_sde(double a, double eps, double horizon,
                                         double h, std::uint64_t seed);

/// a / (e^x + 1) without overflow.
double sigmoid_drift(double a, double x);

}  // namespace pglab
