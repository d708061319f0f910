#include "pglab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "pglab/discrete.hpp"
#include "pglab/random.hpp"
#include "pglab/sde.hpp"

namespace pglab {

BanditInstance two_arm_instance(double delta2) {
  if (!(delta2 > 0.0 && delta2 <= 1.0)) {
    throw std::invalid_argument("two-arm instance needs delta2 in (0, 1]");
  }
  return BanditInstance({1.0, 1.0 - delta2}, {1.0, 1.0});
}

BanditInstance uniform_gap_instance(std::size_t k, double gap) {
  if (k < 2) throw std::invalid_argument("uniform-gap instance needs k >= 2");
  if (!(gap > 0.0 && gap <= 1.0)) {
    throw std::invalid_argument("uniform-gap instance needs gap in (0, 1]");
  }
  std::vector<double> mu(k, 1.0 - gap);
  mu[0] = 1.0;
  return BanditInstance(std::move(mu), std::vector<double>(k, 1.0));
}

BanditInstance lower_bound_instance(std::size_t k, double delta2) {
  if (k < 3) throw std::invalid_argument("lower-bound instance needs k >= 3");
  if (!(delta2 > 0.0 && delta2 < 1.0)) {
    throw std::invalid_argument("lower-bound instance needs delta2 in (0, 1)");
  }
  std::vector<double> mu(k, 0.0);
  std::vector<double> sigma(k, 0.0);
  mu[0] = 1.0;
  mu[1] = 1.0 - delta2;
  sigma[0] = sigma[1] = 1.0;
  return BanditInstance(std::move(mu), std::move(sigma));
}

BanditInstance InstanceFamily::make() const {
  switch (kind) {
    case FamilyKind::kTwoArm:
      return two_arm_instance(delta2);
    case FamilyKind::kUniformGap:
      return uniform_gap_instance(k, delta2);
    case FamilyKind::kLowerBound:
      return lower_bound_instance(k, delta2);
    case FamilyKind::kCustom:
      return BanditInstance(mu, sigma, Validation::kPermissive);
  }
  throw std::logic_error("unhandled instance family");
}

namespace {

const char* family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kTwoArm: return "two-arm";
    case FamilyKind::kUniformGap: return "uniform-gap";
    case FamilyKind::kLowerBound: return "lower-bound";
    case FamilyKind::kCustom: return "custom";
  }
  return "?";
}

FamilyKind parse_family(const std::string& name) {
  if (name == "two-arm") return FamilyKind::kTwoArm;
  if (name == "uniform-gap") return FamilyKind::kUniformGap;
  if (name == "lower-bound") return FamilyKind::kLowerBound;
  if (name == "custom") return FamilyKind::kCustom;
  throw std::invalid_argument("unknown instance family '" + name + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const InstanceFamily& f) {
  j = nlohmann::json{{"kind", family_name(f.kind)}};
  if (f.kind == FamilyKind::kCustom) {
    j["mu"] = f.mu;
    j["sigma"] = f.sigma;
    return;
  }
  if (f.kind != FamilyKind::kTwoArm) j["k"] = f.k;
  j["delta2"] = f.delta2;
}

void from_json(const nlohmann::json& j, InstanceFamily& f) {
  f.kind = parse_family(j.at("kind").get<std::string>());
  if (f.kind == FamilyKind::kCustom) {
    f.mu = j.at("mu").get<std::vector<double>>();
    f.sigma = j.at("sigma").get<std::vector<double>>();
    f.k = f.mu.size();
    f.delta2 = f.k >= 2 ? f.mu[0] - f.mu[1] : 0.0;
    return;
  }
  f.k = f.kind == FamilyKind::kTwoArm ? 2 : j.at("k").get<std::size_t>();
  f.delta2 = j.at("delta2").get<double>();
}

void SweepConfig::validate() const {
  if (eta_grid.empty()) throw std::invalid_argument("eta_grid is empty");
  for (double eta : eta_grid) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
      throw std::invalid_argument("eta_grid entries must be finite and >= 0");
    }
    // Trajectory files are keyed by eta; a repeat would overwrite its twin.
    if (std::count(eta_grid.begin(), eta_grid.end(), eta) > 1) {
      throw std::invalid_argument("eta_grid contains a duplicate value");
    }
  }
  if (seed_count == 0) throw std::invalid_argument("seed range is empty");
  if (!(n >= 1.0)) throw std::invalid_argument("horizon n must be >= 1");
  if (engine == Engine::kContinuous && !(h > 0.0)) {
    throw std::invalid_argument("h must be > 0 for the continuous engine");
  }
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (!(winner_threshold > 0.0 && winner_threshold < 1.0)) {
    throw std::invalid_argument("winner_threshold must lie in (0, 1)");
  }
  if (monitor_lower_bound && instance_family.kind != FamilyKind::kLowerBound) {
    throw std::invalid_argument(
        "monitor_lower_bound requires the lower-bound instance family");
  }
  instance_family.make();
}

void to_json(nlohmann::json& j, const SweepConfig& c) {
  j = nlohmann::json{{"instance_family", c.instance_family},
                     {"engine", to_string(c.engine)},
                     {"eta_grid", c.eta_grid},
                     {"n", c.n},
                     {"h", c.h},
                     {"seeds", {{"first", c.seed_first}, {"count", c.seed_count}}},
                     {"record_stride", c.record_stride},
                     {"output_path", c.output_path},
                     {"monitor_lower_bound", c.monitor_lower_bound},
                     {"winner_threshold", c.winner_threshold},
                     {"workers", c.workers},
                     {"write_trajectories", c.write_trajectories}};
}

void from_json(const nlohmann::json& j, SweepConfig& c) {
  c = SweepConfig{};
  c.instance_family = j.at("instance_family").get<InstanceFamily>();
  c.engine = parse_engine(j.at("engine").get<std::string>());
  c.eta_grid = j.at("eta_grid").get<std::vector<double>>();
  c.n = j.at("n").get<double>();
  c.h = j.value("h", c.h);
  const auto& seeds = j.at("seeds");
  c.seed_first = seeds.at("first").get<std::uint64_t>();
  c.seed_count = seeds.at("count").get<std::uint64_t>();
  c.record_stride = j.value("record_stride", c.record_stride);
  c.output_path = j.value("output_path", c.output_path);
  c.monitor_lower_bound = j.value("monitor_lower_bound", c.monitor_lower_bound);
  c.winner_threshold = j.value("winner_threshold", c.winner_threshold);
  c.workers = j.value("workers", c.workers);
  c.write_trajectories = j.value("write_trajectories", c.write_trajectories);
}

std::string format_double(double x) { return fmt::format("{}", x); }

unsigned worker_count() {
  if (const char* env = std::getenv("PGLAB_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RunResult run_single(const BanditInstance& inst, Engine engine, double eta,
                     double n, double h, std::uint64_t seed, long stride,
                     const MonitorOptions& monitors) {
  if (engine == Engine::kDiscrete) {
    return run_discrete(inst, eta, static_cast<long>(std::llround(n)), seed,
                        stride, monitors);
  }
  SdeConfig cfg;
  cfg.h = h;
  cfg.horizon = n;
  cfg.record_stride = stride;
  return run_continuous(inst, eta, cfg, seed, monitors);
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<EtaAggregate> aggregate(const std::vector<RunSummary>& rows,
                                    const std::vector<double>& eta_grid,
                                    double winner_threshold) {
  std::vector<EtaAggregate> out;
  for (double eta : eta_grid) {
    std::vector<double> regrets;
    double pi_total = 0.0;
    std::size_t wrong = 0;
    std::size_t diverged = 0;
    for (const auto& r : rows) {
      if (r.eta != eta) continue;
      if (r.diverged) {
        ++diverged;
        continue;
      }
      regrets.push_back(r.regret);
      pi_total += r.final_pi1;
      if (r.final_pi1 < winner_threshold) ++wrong;
    }
    EtaAggregate agg{};
    agg.eta = eta;
    agg.runs = regrets.size() + diverged;
    agg.diverged = diverged;
    const double m = static_cast<double>(regrets.size());
    if (!regrets.empty()) {
      agg.mean_regret = std::accumulate(regrets.begin(), regrets.end(), 0.0) / m;
      double ss = 0.0;
      for (double r : regrets) ss += (r - agg.mean_regret) * (r - agg.mean_regret);
      agg.se_regret = regrets.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
      agg.q10_regret = quantile(regrets, 0.1);
      agg.median_regret = quantile(regrets, 0.5);
      agg.q90_regret = quantile(regrets, 0.9);
      agg.mean_final_pi1 = pi_total / m;
      agg.wrong_winner_fraction = static_cast<double>(wrong) / m;
    }
    out.push_back(agg);
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const BanditInstance inst = cfg.instance_family.make();

  namespace fs = std::filesystem;
  const bool persist = !cfg.output_path.empty();
  const fs::path dir = cfg.output_path;
  const fs::path traj_dir = dir / "trajectories";
  if (persist) {
    std::error_code ec;
    fs::create_directories(cfg.write_trajectories ? traj_dir : dir, ec);
    if (ec) {
      throw std::runtime_error("cannot create output directory " +
                               dir.string() + ": " + ec.message());
    }
    open_for_write(dir / "results.csv");
  }

  const std::size_t seeds = cfg.seed_count;
  const std::size_t jobs = cfg.eta_grid.size() * seeds;
  MonitorOptions monitors;
  monitors.lower_bound = cfg.monitor_lower_bound;

  SweepResult result;
  result.rows.resize(jobs);
  parallel_for(jobs, cfg.workers, [&](std::size_t j) {
    const double eta = cfg.eta_grid[j / seeds];
    const std::uint64_t seed = cfg.seed_first + j % seeds;
    RunResult run = run_single(inst, cfg.engine, eta, cfg.n, cfg.h, seed,
                               cfg.record_stride, monitors);
    if (persist && cfg.write_trajectories) {
      auto out = open_for_write(traj_dir / trajectory_file_name(eta, seed));
      write_trajectory_csv(out, run.trajectory);
    }
    result.rows[j] = run.summary;
  });
  result.aggregates = aggregate(result.rows, cfg.eta_grid, cfg.winner_threshold);

  if (persist) {
    {
      auto out = open_for_write(dir / "results.csv");
      write_results_csv(out, result.rows);
    }
    {
      auto out = open_for_write(dir / "aggregates.csv");
      write_aggregates_csv(out, result.aggregates);
    }
    nlohmann::json sidecar{{"config", cfg},
                           {"version", PGLAB_VERSION},
                           {"rng", std::string(RandomStream::kAlgorithm)}};
    auto out = open_for_write(dir / "results.json");
    out << sidecar.dump(2) << '\n';
  }
  return result;
}

namespace {
const char* condition_id(StopCondition c) {
  switch (c) {
    case StopCondition::kHorizon: return "1";
    case StopCondition::kSWindow: return "2";
    case StopCondition::kZThreshold: return "3";
    case StopCondition::kClockMax: return "4";
  }
  return "";
}
}  // namespace

void write_results_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << "seed,eta,engine,k,delta2,n,h,final_pi1,regret,pseudo_regret,"
         "diverged,tau_condition,tau_time,tau_s,min_Z,min_theta\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << format_double(r.eta) << ',' << to_string(r.engine)
        << ',' << r.k << ',' << format_double(r.delta2) << ','
        << format_double(r.n) << ',' << format_double(r.h) << ','
        << format_double(r.final_pi1) << ',' << format_double(r.regret) << ','
        << format_double(r.pseudo_regret) << ',' << (r.diverged ? 1 : 0) << ',';
    if (r.tau) {
      out << condition_id(r.tau->condition) << ',' << format_double(r.tau->time)
          << ',' << format_double(r.tau->s);
    } else {
      out << ",,";
    }
    out << ',' << format_double(r.min_Z) << ',' << format_double(r.min_theta)
        << '\n';
  }
}

void write_aggregates_csv(std::ostream& out,
                          const std::vector<EtaAggregate>& rows) {
  out << "eta,runs,diverged,mean_regret,se_regret,q10_regret,median_regret,"
         "q90_regret,mean_final_pi1,wrong_winner_fraction\n";
  for (const auto& a : rows) {
    out << format_double(a.eta) << ',' << a.runs << ',' << a.diverged << ','
        << format_double(a.mean_regret) << ',' << format_double(a.se_regret)
        << ',' << format_double(a.q10_regret) << ','
        << format_double(a.median_regret) << ',' << format_double(a.q90_regret)
        << ',' << format_double(a.mean_final_pi1) << ','
        << format_double(a.wrong_winner_fraction) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,pi1,Z_min,S,s,regret\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << format_double(traj.pi1[i])
        << ',' << format_double(traj.Z_min[i]) << ',' << format_double(traj.S[i])
        << ',' << format_double(traj.clock_s[i]) << ','
        << format_double(traj.regret[i]) << '\n';
  }
}

std::string trajectory_file_name(double eta, std::uint64_t seed) {
  return fmt::format("traj_eta{}_seed{}.csv", eta, seed);
}

nlohmann::json summary_to_json(const RunSummary& s) {
  nlohmann::json j{{"seed", s.seed},
                   {"eta", s.eta},
                   {"engine", to_string(s.engine)},
                   {"k", s.k},
                   {"delta2", s.delta2},
                   {"n", s.n},
                   {"h", s.h},
                   {"final_pi1", s.final_pi1},
                   {"regret", s.regret},
                   {"pseudo_regret", s.pseudo_regret},
                   {"diverged", s.diverged},
                   {"min_Z", s.min_Z},
                   {"min_theta", s.min_theta}};
  if (s.tau) {
    j["tau_condition"] = static_cast<int>(s.tau->condition);
    j["tau_time"] = s.tau->time;
    j["tau_s"] = s.tau->s;
  } else {
    j["tau_condition"] = nullptr;
    j["tau_time"] = nullptr;
    j["tau_s"] = nullptr;
  }
  return j;
}

HittingEstimate estimate_hitting_prob(HittingKind kind, double a, double eps,
                                      double horizon, double h,
                                      std::size_t num_seeds,
                                      std::uint64_t first_seed,
                                      unsigned workers) {
  if (num_seeds == 0) throw std::invalid_argument("need at least one seed");
  std::vector<char> hits(num_seeds, 0);
  parallel_for(num_seeds, workers, [&](std::size_t i) {
    const std::uint64_t seed = first_seed + i;
    const HittingSample sample =
        kind == HittingKind::kDriftedBm
            ? simulate_drifted_bm(a, eps, horizon, h, seed)
            : simulate_sigmoid_drift_sde(a, eps, horizon, h, seed);
    hits[i] = sample.hit ? 1 : 0;
  });
  HittingEstimate est{};
  est.trials = num_seeds;
  est.hits = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1));
  est.p_hat = static_cast<double>(est.hits) / static_cast<double>(num_seeds);
  est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(num_seeds));
  return est;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty KS sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

ConsistencyReport discrete_continuous_consistency(
    const BanditInstance& discrete_inst, const BanditInstance& continuous_inst,
    double eta, long n, double h, std::size_t num_seeds, unsigned workers) {
  if (discrete_inst.k() != continuous_inst.k()) {
    throw std::invalid_argument("engines were given instances with different k");
  }
  if (!(h > 0.0 && h <= 0.1)) {
    throw std::invalid_argument("consistency check needs 0 < h <= 0.1");
  }
  if (num_seeds == 0) throw std::invalid_argument("need at least one seed");
  std::vector<double> disc(num_seeds);
  std::vector<double> cont(num_seeds);
  const long stride = std::max(1L, n);
  parallel_for(2 * num_seeds, workers, [&](std::size_t j) {
    const std::size_t i = j / 2;
    if (j % 2 == 0) {
      disc[i] = run_discrete(discrete_inst, eta, n, i, stride).summary.final_pi1;
    } else {
      SdeConfig cfg;
      cfg.h = h;
      cfg.horizon = static_cast<double>(n);
      cfg.record_stride = std::max(1L, static_cast<long>(n / h));
      cont[i] = run_continuous(continuous_inst, eta, cfg, i).summary.final_pi1;
    }
  });
  ConsistencyReport rep{};
  rep.seeds = num_seeds;
  rep.mean_pi1_discrete = std::accumulate(disc.begin(), disc.end(), 0.0) / num_seeds;
  rep.mean_pi1_continuous = std::accumulate(cont.begin(), cont.end(), 0.0) / num_seeds;
  rep.ks = ks_statistic(std::move(disc), std::move(cont));
  return rep;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace pglab
