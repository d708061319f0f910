// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// value and runtime budget. Usage: pglab_acceptance [--only N]... [--allow-fail N]...
// Exit status is the number of failing criteria not listed in --allow-fail.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pglab/bounds.hpp"
#include "pglab/experiments.hpp"
#include "pglab/sde.hpp"
#include "pglab/verify.hpp"

using namespace pglab;

namespace {

struct Outcome {
  bool pass;
  std::string summary;
};

Outcome from_checks(const std::vector<verify::CheckResult>& checks) {
  Outcome o{true, ""};
  for (const auto& c : checks) {
    o.pass = o.pass && c.passed;
    if (!o.summary.empty()) o.summary += "; ";
    o.summary += fmt::format("{} {} (measured {:.4g}, threshold {:.4g})",
                             c.passed ? "ok" : "FAILED", c.name, c.measured, c.threshold);
  }
  return o;
}

Outcome gradient() {
  return from_checks({verify::gradient_vs_finite_differences(1000, 1)});
}

Outcome conservation() {
  return from_checks({verify::continuous_conservation(1000000, 10, 0),
                      verify::discrete_conservation(1000000, 10, 0)});
}

Outcome identities() {
  return from_checks({verify::lower_sde_identities(10000, 5),
                      verify::z_coefficient_identities(10000, 6)});
}

Outcome drifted_bm() {
  return from_checks({verify::drifted_bm_hitting(10000, 0)});
}

Outcome sigmoid_hitting() {
  return from_checks({verify::sigmoid_zero_drift_reflection(10000, 0),
                      verify::sigmoid_strong_drift_no_hits(10000, 0)});
}

Outcome two_arm_regret() {
  SweepConfig cfg;
  cfg.instance_family.kind = FamilyKind::kTwoArm;
  cfg.instance_family.delta2 = 0.1;
  cfg.engine = Engine::kContinuous;
  cfg.eta_grid = {0.05};
  cfg.n = 1e4;
  cfg.h = 0.01;
  cfg.seed_count = 3000;
  cfg.record_stride = 1 << 30;
  const auto agg = run_sweep(cfg).aggregates.at(0);
  const double bound = bounds::two_arm_regret_bound(0.1, 0.05, 1e4).value;
  const double upper = agg.mean_regret + 2.0 * agg.se_regret;
  return {upper <= bound,
          fmt::format("{} seeds: mean regret {:.2f} + 2 SE ({:.2f}) = {:.2f} vs bound {:.4f}",
                      agg.runs, agg.mean_regret, agg.se_regret, upper, bound)};
}

Outcome lemma_z() {
  return from_checks({verify::lemma_z_lower_bound(5, 0.5, 100.0, 0.1, 0.01, 500, 0)});
}

Outcome lemma_theta() {
  return from_checks({verify::lemma_theta_lower_bound(0.5, 5, 100.0, 0.2, 0.01, 500, 0)});
}

Outcome lemma_pi() {
  return from_checks({verify::lemma_pi_sweep(100000, 7)});
}

Outcome winner_picking() {
  SweepConfig cfg;
  cfg.instance_family.kind = FamilyKind::kLowerBound;
  cfg.instance_family.k = 20;
  cfg.instance_family.delta2 = 0.002;
  cfg.engine = Engine::kDiscrete;
  cfg.eta_grid = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  cfg.n = 2e5;
  cfg.seed_count = 100;
  cfg.record_stride = 1 << 30;
  const auto result = run_sweep(cfg);
  double at_target = 0.0;
  std::string trend;
  for (const auto& a : result.aggregates) {
    if (a.eta == 0.05) at_target = a.wrong_winner_fraction;
    trend += fmt::format(" eta={}: {:.2f} (mean final pi1 {:.2f});", a.eta,
                         a.wrong_winner_fraction, a.mean_final_pi1);
  }
  return {at_target >= 0.2,
          fmt::format("fraction with final pi1 < 1/2 at eta=0.05: {:.2f} (need >= 0.2). "
                      "Across the grid:{}",
                      at_target, trend)};
}

Outcome sublinear_regret() {
  const double eta = bounds::upper_bound_threshold(0.5, 100.0);
  const auto inst = uniform_gap_instance(5, 0.5);
  constexpr std::size_t kSeeds = 200;
  SdeConfig cfg;
  cfg.h = 0.01;
  cfg.horizon = 100.0;
  cfg.record_stride = 100;  // one record per unit of time
  std::vector<double> first(kSeeds), last(kSeeds);
  std::vector<char> no_collapse(kSeeds);
  parallel_for(kSeeds, 0, [&](std::size_t i) {
    const auto run = run_continuous(inst, eta, cfg, i);
    const auto& r = run.trajectory.regret;
    first[i] = (r.at(25) - r.at(0)) / 25.0;
    last[i] = (r.at(100) - r.at(75)) / 25.0;
    no_collapse[i] = run.summary.min_Z > -0.25;
  });
  double f = 0.0, l = 0.0, ok = 0.0;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    f += first[i] / kSeeds;
    l += last[i] / kSeeds;
    ok += no_collapse[i] / static_cast<double>(kSeeds);
  }
  const bool sublinear = l < 0.5 * f;
  const bool stable = ok >= 0.85;
  return {sublinear && stable,
          fmt::format("eta = {:.6g}; mean regret slope first quarter {:.4f}, final quarter {:.4f} "
                      "(ratio {:.3f}, need < 0.5: {}); runs with min Z > -delta2/2: {:.3f} "
                      "(need >= 0.85: {})",
                      eta, f, l, l / f, sublinear ? "ok" : "FAILED", ok, stable ? "ok" : "FAILED")};
}

Outcome psi_machinery() {
  return from_checks({verify::psi_bound_at_k_log(), verify::psi_second_derivative(),
                      verify::psi_shape_and_quadrature()});
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, allowed;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const int value = std::atoi(argv[i + 1]);
    if (flag == "--only") {
      only.insert(value);
    } else if (flag == "--allow-fail") {
      allowed.insert(value);
    } else {
      std::cerr << "unknown flag " << flag << '\n';
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "policy gradient vs central differences", 5, gradient},
      {2, "sum of theta conserved (continuous and discrete)", 30, conservation},
      {3, "drift/diffusion identity suite", 5, identities},
      {4, "drifted Brownian motion hitting probability", 60, drifted_bm},
      {5, "sigmoid-drift hitting: reflection and strong drift", 60, sigmoid_hitting},
      {6, "two-arm expected regret below the closed-form bound", 600, two_arm_regret},
      {7, "P(inf Z <= -delta2/2) <= delta", 300, lemma_z},
      {8, "P(inf theta <= -log(n/delta)) <= delta", 300, lemma_theta},
      {9, "1/pi_0 bound on admissible states", 10, lemma_pi},
      {10, "lower-bound instance picks a winner at random", 1200, winner_picking},
      {11, "small-eta regime: sublinear regret, no collapse", 300, sublinear_regret},
      {12, "psi potential checks", 1, psi_machinery},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    std::string status = pass ? "PASS" : "FAIL";
    if (!pass && allowed.count(c.id)) status += " (known, allowed)";
    std::cout << fmt::format("[{}] criterion {:2}: {} | {} | runtime {:.1f}s of {:.0f}s{}\n",
                             status, c.id, c.title, o.summary, secs, c.budget_seconds,
                             in_time ? "" : " EXCEEDED")
              << std::flush;
    if (!pass && !allowed.count(c.id)) ++unexpected;
  }
  return unexpected;
}
