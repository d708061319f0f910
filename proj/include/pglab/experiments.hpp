#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pglab/core.hpp"
#include "pglab/trajectory.hpp"

namespace pglab {

/// mu = (1, 1 - delta2), sigma = (1, 1).
BanditInstance two_arm_instance(double delta2);
/// mu = (1, 1 - gap, ..., 1 - gap), unit noise on every arm.
BanditInstance uniform_gap_instance(std::size_t k, double gap);
/// mu = (1, 1 - delta2, 0, ..., 0), noise only on the first two arms.
BanditInstance lower_bound_instance(std::size_t k, double delta2);

enum class FamilyKind { kTwoArm, kUniformGap, kLowerBound, kCustom };

struct InstanceFamily {
  FamilyKind kind = FamilyKind::kTwoArm;
  std::size_t k = 2;
  double delta2 = 0.1;
  std::vector<double> mu;
  std::vector<double> sigma;

  BanditInstance make() const;
};

void to_json(nlohmann::json& j, const InstanceFamily& f);
void from_json(const nlohmann::json& j, InstanceFamily& f);

struct SweepConfig {
  InstanceFamily instance_family;
  Engine engine = Engine::kDiscrete;
  std::vector<double> eta_grid;
  double n = 1000;
  /// Step size of the continuous engine; ignored by the discrete engine.
  double h = 0.01;
  std::uint64_t seed_first = 0;
  std::uint64_t seed_count = 1;
  long record_stride = 1;
  /// Output directory; empty disables persistence.
  std::string output_path;
  /// Track the lower-bound stopping conditions (lower-bound family, k >= 5).
  bool monitor_lower_bound = false;
  /// Runs whose final pi_0 falls below this count as "picked the wrong arm".
  double winner_threshold = 0.5;
  /// Zero means worker_count().
  unsigned workers = 0;
  bool write_trajectories = true;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

void to_json(nlohmann::json& j, const SweepConfig& c);
void from_json(const nlohmann::json& j, SweepConfig& c);

struct EtaAggregate {
  double eta;
  std::size_t runs;
  std::size_t diverged;
  double mean_regret;
  double se_regret;
  double q10_regret;
  double median_regret;
  double q90_regret;
  double mean_final_pi1;
  /// Fraction of runs with final pi_0 below the winner threshold.
  double wrong_winner_fraction;
};

struct SweepResult {
  /// Ordered by (eta grid position, seed).
  std::vector<RunSummary> rows;
  std::vector<EtaAggregate> aggregates;
};

/// Runs every (eta, seed) pair. Seeds drive common random numbers: a seed
/// produces the same noise stream for every eta. Output is independent of
/// the worker count. When output_path is set, writes results.csv,
/// results.json, aggregates.csv and trajectories/traj_eta<eta>_seed<seed>.csv;
/// the directory is checked for writability before any simulation.
SweepResult run_sweep(const SweepConfig& cfg);

RunResult run_single(const BanditInstance& inst, Engine engine, double eta,
                     double n, double h, std::uint64_t seed, long stride,
                     const MonitorOptions& monitors = {});

std::vector<EtaAggregate> aggregate(const std::vector<RunSummary>& rows,
                                    const std::vector<double>& eta_grid,
                                    double winner_threshold);

/// Column order: seed, eta, engine, k, delta2, n, h, final_pi1, regret,
/// pseudo_regret, diverged, tau_condition, tau_time, tau_s, min_Z, min_theta.
void write_results_csv(std::ostream& out, const std::vector<RunSummary>& rows);
void write_aggregates_csv(std::ostream& out,
                          const std::vector<EtaAggregate>& rows);
/// Columns t, pi1, Z_min, S, s, regret.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_file_name(double eta, std::uint64_t seed);

nlohmann::json summary_to_json(const RunSummary& s);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Worker count from PGLAB_WORKERS, else hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for i in [0, count) across `workers` threads. Exceptions are
/// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

enum class HittingKind { kDriftedBm, kSigmoidDrift };

struct HittingEstimate {
  double p_hat;
  double se;
  std::size_t hits;
  std::size_t trials;
};

HittingEstimate estimate_hitting_prob(HittingKind kind, double a, double eps,
                                      double horizon, double h,
                                      std::size_t num_seeds,
                                      std::uint64_t first_seed = 0,
                                      unsigned workers = 0);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct ConsistencyReport {
  double ks;
  double mean_pi1_discrete;
  double mean_pi1_continuous;
  std::size_t seeds;
};

/// Compares final pi_0 between n discrete rounds and the continuous engine
/// over horizon n with step h. Throws std::invalid_argument when the two
/// instances differ in k or h > 0.1.
ConsistencyReport discrete_continuous_consistency(
    const BanditInstance& discrete_inst, const BanditInstance& continuous_inst,
    double eta, long n, double h, std::size_t num_seeds, unsigned workers = 0);

inline ConsistencyReport discrete_continuous_consistency(
    const BanditInstance& inst, double eta, long n, double h,
    std::size_t num_seeds, unsigned workers = 0) {
  return discrete_continuous_consistency(inst, inst, eta, n, h, num_seeds,
                                         workers);
}

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace pglab
