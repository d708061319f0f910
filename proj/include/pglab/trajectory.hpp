#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pglab/core.hpp"
#include "pglab/diagnostics.hpp"

namespace pglab {

enum class Engine { kDiscrete, kContinuous };

std::string to_string(Engine engine);
Engine parse_engine(const std::string& name);

/// Subsampled path of one run. Z holds theta_0 - theta_a for a = 1..k-1.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> pi1;
  std::vector<std::vector<double>> Z;
  std::vector<double> Z_min;
  std::vector<double> S;
  std::vector<double> clock_s;
  std::vector<double> regret;
  std::vector<StopEvent> stop_events;

  std::size_t size() const { return times.size(); }
  void record(const PolicyState& state);
  bool operator==(const Trajectory&) const = default;
};

/// Terminal statistics of one run. Regret, minima and monitor state use
/// every step, not only recorded ones.
struct RunSummary {
  std::uint64_t seed = 0;
  double eta = 0.0;
  Engine engine = Engine::kDiscrete;
  std::size_t k = 0;
  double delta2 = 0.0;
  double n = 0.0;
  double h = 0.0;
  double final_pi1 = 0.0;
  double regret = 0.0;
  double pseudo_regret = 0.0;
  bool diverged = false;
  std::optional<StopEvent> tau;
  double min_Z = 0.0;
  double min_theta = 0.0;
  long z_relaxation_violations = 0;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
  PolicyState final_state;
};

/// Optional per-trajectory monitors.
struct MonitorOptions {
  bool lower_bound = false;
  /// Stop the run at the first stopping-condition firing.
  bool halt_on_stop = false;
};

namespace detail {

/// Running minima over all steps of a run.
struct RunningMinima {
  double min_Z = 0.0;
  double min_theta = 0.0;
  void observe(const std::vector<double>& theta);
};

bool all_finite(const std::vector<double>& x);

}  // namespace detail

}  // namespace pglab
