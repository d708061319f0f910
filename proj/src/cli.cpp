#include "pglab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "pglab/bounds.hpp"
#include "pglab/experiments.hpp"
#include "pglab/random.hpp"
#include "pglab/sde.hpp"
#include "pglab/svg_plot.hpp"
#include "pglab/verify.hpp"

namespace pglab::cli {

namespace {

/// Bad flags or configuration; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

struct SimulateArgs {
  std::string engine = "discrete";
  std::string instance = "two-arm";
  std::string instance_file;
  std::optional<std::size_t> k;
  double delta2 = 0.1;
  double eta = 0.0;
  double n = 0.0;
  std::optional<double> h;
  std::uint64_t seed = 0;
  std::optional<long> stride;
  std::string out;
  bool monitor = false;
};

InstanceFamily family_from_flags(const SimulateArgs& a) {
  InstanceFamily f;
  if (a.instance == "custom-file") {
    require(!a.instance_file.empty(), "--instance custom-file needs --instance-file");
    std::ifstream in(a.instance_file);
    require(static_cast<bool>(in), "--instance-file: cannot open " + a.instance_file);
    auto j = nlohmann::json::parse(in);
    if (!j.contains("kind")) j["kind"] = "custom";
    f = j.get<InstanceFamily>();
    return f;
  }
  require(a.instance_file.empty(), "--instance-file requires --instance custom-file");
  require(a.delta2 > 0.0 && a.delta2 < 1.0, "--delta2 must lie in (0, 1)");
  f.delta2 = a.delta2;
  if (a.instance == "two-arm") {
    require(!a.k || *a.k == 2, "--k must be 2 for the two-arm instance");
    f.kind = FamilyKind::kTwoArm;
    f.k = 2;
  } else if (a.instance == "uniform-gap") {
    f.kind = FamilyKind::kUniformGap;
    f.k = a.k.value_or(5);
  } else {
    f.kind = FamilyKind::kLowerBound;
    f.k = a.k.value_or(20);
  }
  return f;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  require(std::isfinite(a.eta) && a.eta >= 0.0, "--eta must be finite and >= 0");
  require(std::isfinite(a.n) && a.n >= 1.0, "--n must be >= 1");
  const Engine engine = parse_engine(a.engine);
  const double h = a.h.value_or(default_step(a.eta));
  if (engine == Engine::kContinuous) {
    require(std::isfinite(h) && h > 0.0, "--h must be > 0 for the continuous engine");
    require(h <= a.n, "--h must not exceed --n");
  }
  require(!a.stride || *a.stride >= 1, "--stride must be >= 1");
  const InstanceFamily family = family_from_flags(a);
  BanditInstance inst = [&] {
    try {
      return family.make();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("instance: ") + e.what());
    }
  }();
  MonitorOptions monitors;
  if (a.monitor) {
    require(family.kind == FamilyKind::kLowerBound && inst.k() >= 5,
            "--monitor needs --instance lower-bound with --k >= 5");
    monitors.lower_bound = true;
  }

  const double steps = engine == Engine::kDiscrete ? a.n : std::ceil(a.n / h);
  const long stride =
      a.stride.value_or(std::max<long>(1, static_cast<long>(steps / 1000.0)));
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    require(static_cast<bool>(file), "--out: cannot write " + a.out);
  }

  const RunResult run = run_single(inst, engine, a.eta, a.n, h, a.seed, stride, monitors);
  if (file.is_open()) write_trajectory_csv(file, run.trajectory);
  out << summary_to_json(run.summary).dump() << '\n';
  return run.summary.diverged ? kFailure : kOk;
}

struct SweepArgs {
  std::string config;
  std::string out;
  unsigned workers = 0;
};

int do_sweep(const SweepArgs& a, std::ostream& out) {
  std::ifstream in(a.config);
  require(static_cast<bool>(in), "--config: cannot open " + a.config);
  SweepConfig cfg;
  try {
    cfg = nlohmann::json::parse(in).get<SweepConfig>();
    if (!a.out.empty()) cfg.output_path = a.out;
    if (a.workers > 0) cfg.workers = a.workers;
    cfg.validate();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("--config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--config: ") + e.what());
  }
  SweepResult result;
  try {
    result = run_sweep(cfg);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());  // unwritable output path
  }
  write_aggregates_csv(out, result.aggregates);
  return kOk;
}

struct VerifyArgs {
  std::string suite = "all";
  std::size_t seeds = 10000;
  double budget = 1.0;
  unsigned workers = 0;
};

int do_verify(const VerifyArgs& a, std::ostream& out) {
  require(verify::is_known_suite(a.suite), "--suite: unknown suite '" + a.suite + "'");
  require(a.seeds >= 1, "--seeds must be >= 1");
  require(std::isfinite(a.budget) && a.budget > 0.0, "--budget must be > 0");
  verify::SuiteOptions opts;
  opts.seeds = a.seeds;
  opts.budget = a.budget;
  opts.workers = a.workers;
  const auto results = verify::run_suite(a.suite, opts);
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    out << fmt::format("{} {}  measured={:.6g} threshold={:.6g}  ({:.2f}s)  {}\n",
                       r.passed ? "PASS" : "FAIL", r.name, r.measured, r.threshold,
                       r.seconds, r.detail);
  }
  out << fmt::format("{} checks, {} failed\n", results.size(), failed);
  return failed == 0 ? kOk : kFailure;
}

struct BoundsArgs {
  bool two_arm = false;
  bool threshold = false;
  bool upper = false;
  bool bm_drift = false;
  bool bm_less_drift = false;
  bool s_max = false;
  bool z_threshold = false;
  std::optional<double> delta2, eta, n, delta, a, eps, s;
  std::optional<int> k;
};

double need(const std::optional<double>& v, const char* flag, const char* bound) {
  require(v.has_value(), fmt::format("{} requires {}", bound, flag));
  return *v;
}

void print_report(std::ostream& out, const bounds::BoundReport& r) {
  std::string inputs;
  for (const auto& [key, value] : r.inputs) inputs += fmt::format(" {}={}", key, value);
  out << fmt::format("{}{} value={:.12g} hypotheses={}{}\n", r.name, inputs, r.value,
                     r.hypotheses_met ? "met" : "not-met",
                     r.hypothesis_notes.empty() ? "" : " (" + r.hypothesis_notes + ")");
}

void print_value(std::ostream& out, const std::string& name,
                 const std::map<std::string, double>& inputs, double value) {
  print_report(out, bounds::BoundReport{name, inputs, value, true, ""});
}

int do_bounds(const BoundsArgs& a, std::ostream& out) {
  require(a.two_arm || a.threshold || a.upper || a.bm_drift || a.bm_less_drift ||
              a.s_max || a.z_threshold,
          "bounds: select at least one of --two-arm, --threshold, --upper, "
          "--bm-drift, --bm-less-drift, --s-max, --z-threshold");
  try {
    if (a.two_arm) {
      print_report(out, bounds::two_arm_regret_bound(need(a.delta2, "--delta2", "--two-arm"),
                                                     need(a.eta, "--eta", "--two-arm"),
                                                     need(a.n, "--n", "--two-arm")));
    }
    if (a.threshold) {
      const double d2 = need(a.delta2, "--delta2", "--threshold");
      const double n = need(a.n, "--n", "--threshold");
      print_value(out, "upper_bound_threshold", {{"delta2", d2}, {"n", n}},
                  bounds::upper_bound_threshold(d2, n));
    }
    if (a.upper) {
      require(a.k.has_value(), "--upper requires --k");
      print_report(out, bounds::upper_bound_regret(*a.k, need(a.eta, "--eta", "--upper"),
                                                   need(a.n, "--n", "--upper"),
                                                   a.delta.value_or(0.0)));
    }
    if (a.bm_drift) {
      const double drift = need(a.a, "--a", "--bm-drift");
      const double eps = need(a.eps, "--eps", "--bm-drift");
      print_value(out, "bm_drift_bound", {{"a", drift}, {"eps", eps}},
                  bounds::bm_drift_bound(drift, eps));
    }
    if (a.bm_less_drift) {
      const double drift = need(a.a, "--a", "--bm-less-drift");
      const double eps = need(a.eps, "--eps", "--bm-less-drift");
      const double n = need(a.n, "--n", "--bm-less-drift");
      print_value(out, "bm_less_drift_bound", {{"a", drift}, {"eps", eps}, {"n", n}},
                  bounds::bm_less_drift_bound(drift, eps, n));
    }
    if (a.s_max) {
      const double eta = need(a.eta, "--eta", "--s-max");
      const double n = need(a.n, "--n", "--s-max");
      const double eps = need(a.eps, "--eps", "--s-max");
      print_value(out, "s_max", {{"eta", eta}, {"n", n}, {"eps", eps}},
                  bounds::s_max(eta, n, eps));
    }
    if (a.z_threshold) {
      const double s = need(a.s, "--s", "--z-threshold");
      const double eta = need(a.eta, "--eta", "--z-threshold");
      const double eps = need(a.eps, "--eps", "--z-threshold");
      const auto z = bounds::z_threshold(s, eta, eps);
      print_value(out, "z_threshold", {{"s", s}, {"eta", eta}, {"eps", eps}}, z.threshold);
      print_value(out, "z_relaxation", {{"s", s}, {"eta", eta}, {"eps", eps}}, z.relaxation);
    }
  } catch (const std::logic_error& e) {  // invalid_argument, domain_error
    throw UsageError(e.what());
  }
  return kOk;
}

struct PlotArgs {
  std::string in;
  std::string out;
  std::string field = "pi1";
  bool logx = false;
  double alpha = 0.3;
};

int do_plot(const PlotArgs& a, std::ostream& out) {
  require(a.alpha > 0.0 && a.alpha <= 1.0, "--alpha must lie in (0, 1]");
  const auto files = plot::expand_glob(a.in);
  require(!files.empty(), "--in: no files match '" + a.in + "'");
  std::vector<plot::Series> series;
  try {
    for (const auto& f : files) series.push_back(plot::load_series(f, a.field));
  } catch (const plot::PlotError& e) {
    throw UsageError(std::string("--field/--in: ") + e.what());
  }
  plot::PlotOptions opts;
  opts.field = a.field;
  opts.log_x = a.logx;
  opts.alpha = a.alpha;
  std::ofstream file(a.out, std::ios::binary);
  require(static_cast<bool>(file), "--out: cannot write " + a.out);
  file << plot::render_svg(series, opts);
  out << fmt::format("wrote {} ({} trajectories)\n", a.out, series.size());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Softmax policy-gradient bandit laboratory", "pglab"};
  app.set_version_flag("--version", std::string("pglab ") + PGLAB_VERSION + " (rng " +
                                        std::string(RandomStream::kAlgorithm) + ")");
  // "--h" is the Euler step, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one trajectory; print its summary as JSON");
  simulate->add_option("--engine", sim.engine, "discrete | continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  simulate->add_option("--instance", sim.instance, "two-arm | uniform-gap | lower-bound | custom-file")
      ->check(CLI::IsMember({"two-arm", "uniform-gap", "lower-bound", "custom-file"}));
  simulate->add_option("--instance-file", sim.instance_file, "JSON instance (kind/k/delta2 or mu/sigma)");
  simulate->add_option("--k", sim.k, "Number of arms");
  simulate->add_option("--delta2", sim.delta2, "Gap between the two best arms")->capture_default_str();
  simulate->add_option("--eta", sim.eta, "Learning rate")->required();
  simulate->add_option("--n", sim.n, "Horizon (rounds or continuous time)")->required();
  simulate->add_option("--h", sim.h, "Euler step (continuous engine)");
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--stride", sim.stride, "Record every stride-th step");
  simulate->add_option("--out", sim.out, "Trajectory CSV path");
  simulate->add_flag("--monitor", sim.monitor, "Track the lower-bound stopping conditions");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run an (eta, seed) grid from a JSON config");
  sweep->add_option("--config", sw.config, "Sweep configuration (JSON)")->required();
  sweep->add_option("--out", sw.out, "Override output_path");
  sweep->add_option("--workers", sw.workers, "Worker threads (default: PGLAB_WORKERS or cores)");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Run property and Monte Carlo checks");
  verify_cmd->add_option("--suite", ver.suite, "identities | lemmas | hitting | all")->capture_default_str();
  verify_cmd->add_option("--seeds", ver.seeds, "Replications for Monte Carlo checks")->capture_default_str();
  verify_cmd->add_option("--budget", ver.budget, "Multiplier on other sample counts")->capture_default_str();
  verify_cmd->add_option("--workers", ver.workers, "Worker threads");

  BoundsArgs bd;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate closed-form bounds");
  bounds_cmd->add_flag("--two-arm", bd.two_arm, "Two-arm expected-regret bound");
  bounds_cmd->add_flag("--threshold", bd.threshold, "Largest eta covered by the k-armed bound");
  bounds_cmd->add_flag("--upper", bd.upper, "k-armed regret bound");
  bounds_cmd->add_flag("--bm-drift", bd.bm_drift, "Hitting bound for drifted Brownian motion");
  bounds_cmd->add_flag("--bm-less-drift", bd.bm_less_drift, "Hitting bound for sigmoid drift");
  bounds_cmd->add_flag("--s-max", bd.s_max, "Terminal clock of the lower-bound stopping time");
  bounds_cmd->add_flag("--z-threshold", bd.z_threshold, "Z stopping threshold and its relaxation");
  bounds_cmd->add_option("--delta2", bd.delta2);
  bounds_cmd->add_option("--eta", bd.eta);
  bounds_cmd->add_option("--n", bd.n);
  bounds_cmd->add_option("--k", bd.k);
  bounds_cmd->add_option("--delta", bd.delta, "Confidence (default 1/n)");
  bounds_cmd->add_option("--a", bd.a, "Drift");
  bounds_cmd->add_option("--eps", bd.eps);
  bounds_cmd->add_option("--s", bd.s, "Clock value");

  PlotArgs pl;
  auto* plot_cmd = app.add_subcommand("plot", "Overlay trajectory CSVs into an SVG");
  plot_cmd->add_option("--in", pl.in, "Glob of trajectory CSVs")->required();
  plot_cmd->add_option("--out", pl.out, "SVG path")->required();
  plot_cmd->add_option("--field", pl.field, "Column to plot")->capture_default_str();
  plot_cmd->add_flag("--logx", pl.logx, "Logarithmic time axis");
  plot_cmd->add_option("--alpha", pl.alpha, "Per-trajectory opacity")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return do_simulate(sim, out);
    if (sweep->parsed()) return do_sweep(sw, out);
    if (verify_cmd->parsed()) return do_verify(ver, out);
    if (bounds_cmd->parsed()) return do_bounds(bd, out);
    if (plot_cmd->parsed()) return do_plot(pl, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace pglab::cli
