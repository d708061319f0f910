#include "pglab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "pglab/bounds.hpp"
#include "pglab/core.hpp"
#include "pglab/diagnostics.hpp"
#include "pglab/discrete.hpp"
#include "pglab/experiments.hpp"
#include "pglab/random.hpp"
#include "pglab/sde.hpp"

namespace pglab::verify {

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::function<CheckResult()>& body) {
  const auto start = Clock::now();
  CheckResult r = body();
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

double uniform_in(RandomStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

std::size_t index_in(RandomStream& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

// Standard-validation means: mu_0 = 1 > mu_1 >= ... >= mu_{k-1} >= 0.
std::vector<double> random_standard_means(RandomStream& rng, std::size_t k) {
  std::vector<double> mu(k);
  mu[0] = 1.0;
  for (std::size_t a = 1; a < k; ++a) mu[a] = uniform_in(rng, 0.0, 0.999);
  std::sort(mu.begin() + 1, mu.end(), std::greater<>());
  return mu;
}

std::vector<double> random_theta(RandomStream& rng, std::size_t k, double width) {
  std::vector<double> theta(k);
  for (double& v : theta) v = uniform_in(rng, -width, width);
  return theta;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

std::size_t scaled(double base, double budget) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(base * budget));
}

}  // namespace

CheckResult gradient_vs_finite_differences(std::size_t samples,
                                           std::uint64_t seed) {
  return timed([&] {
    constexpr std::size_t kArms[] = {2, 3, 5, 10};
    constexpr double kStep = 1e-5;
    RandomStream rng(seed, stream_tag::kVerify);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = kArms[i % 4];
      std::vector<double> mu(k);
      for (double& m : mu) m = rng.uniform();
      const BanditInstance inst(mu, std::vector<double>(k, 1.0),
                                Validation::kPermissive);
      auto theta = random_theta(rng, k, 3.0);
      const auto grad = policy_gradient(theta, inst);
      std::vector<double> err(k);
      for (std::size_t a = 0; a < k; ++a) {
        auto up = theta;
        auto down = theta;
        up[a] += kStep;
        down[a] -= kStep;
        const double fd = (value(up, inst) - value(down, inst)) / (2.0 * kStep);
        err[a] = grad[a] - fd;
      }
      worst = std::max(worst, max_abs(err) / max_abs(grad));
    }
    return CheckResult{"core: policy gradient vs central differences",
                       worst <= 1e-6, worst, 1e-6,
                       fmt::format("{} samples, k in {{2,3,5,10}}", samples)};
  });
}

CheckResult softmax_shift_invariance(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = index_in(rng, 2, 10);
      auto theta = random_theta(rng, k, 5.0);
      const double c = uniform_in(rng, -100.0, 100.0);
      auto shifted = theta;
      for (double& v : shifted) v += c;
      const auto p = softmax(theta);
      const auto q = softmax(shifted);
      for (std::size_t a = 0; a < k; ++a) worst = std::max(worst, std::fabs(p[a] - q[a]));
    }
    return CheckResult{"core: softmax shift invariance", worst <= 1e-12, worst,
                       1e-12, fmt::format("{} samples, |c| <= 100", samples)};
  });
}

CheckResult gradient_orthogonality(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = index_in(rng, 2, 20);
      const BanditInstance inst(random_standard_means(rng, k),
                                std::vector<double>(k, 1.0));
      const auto grad = policy_gradient(random_theta(rng, k, 5.0), inst);
      worst = std::max(worst, std::fabs(sum(grad)));
    }
    return CheckResult{"core: gradient sums to zero", worst <= 1e-12, worst,
                       1e-12, fmt::format("{} samples", samples)};
  });
}

CheckResult regret_non_negative(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    double lowest = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = index_in(rng, 2, 20);
      const BanditInstance inst(random_standard_means(rng, k),
                                std::vector<double>(k, 1.0));
      const auto pi = softmax(random_theta(rng, k, 10.0));
      lowest = std::min(lowest, instant_regret(pi, inst));
    }
    return CheckResult{"core: instantaneous regret >= 0", lowest >= 0.0, lowest,
                       0.0, fmt::format("{} samples", samples)};
  });
}

CheckResult lower_sde_identities(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    std::size_t failures = 0;
    std::string first_failure;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = index_in(rng, 3, 40);
      const double delta2 = uniform_in(rng, 1e-3, 0.5);
      const double eta = uniform_in(rng, 1e-3, 0.5);
      const auto inst = lower_bound_instance(k, delta2);
      const double m = static_cast<double>(k - 2);
      const double S = uniform_in(rng, -5.0, 15.0);
      const double Z = uniform_in(rng, -10.0, 10.0);
      std::vector<double> theta(k, -S / m);
      theta[0] = (S + Z) / 2.0;
      theta[1] = (S - Z) / 2.0;
      const auto state = PolicyState::from_theta(theta);
      for (const auto& c : cross_checks(lower_sde_coefficients(state, inst, eta))) {
        if (!c.passed) {
          if (failures == 0) {
            first_failure = fmt::format("{}: {} vs {} (S={}, Z={}, k={})",
                                        c.name, c.lhs, c.rhs, S, Z, k);
          }
          ++failures;
        }
      }
    }
    return CheckResult{
        "diagnostics: lower-bound SDE cross-checks (1e-12)", failures == 0,
        static_cast<double>(failures), 0.0,
        failures == 0 ? fmt::format("{} random states x 9 checks", samples)
                      : first_failure};
  });
}

CheckResult z_coefficient_identities(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    std::size_t failures = 0;
    std::string first_failure;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t k = index_in(rng, 2, 12);
      const BanditInstance inst(random_standard_means(rng, k),
                                std::vector<double>(k, 1.0));
      const auto state = PolicyState::from_theta(random_theta(rng, k, 6.0));
      const double eta = uniform_in(rng, 1e-3, 1.0);
      const std::size_t a = index_in(rng, 1, k - 1);
      const auto z = z_coefficients(state, inst, eta, a);
      const auto& pi = state.pi;
      // The inner-product route subtracts pi_b mu_b from pi_b <pi, mu>.
      const double scale = eta * (pi[0] + pi[a]) * inst.best_mean();
      const bool drift_ok =
          std::fabs(z.drift - z.drift_inner_product) <=
          1e-12 * std::max({scale, std::fabs(z.drift), std::fabs(z.drift_inner_product)});
      const bool diff_ok = approx_equal(z.diffusion, z.diffusion_direct, 1e-12);
      if (!(drift_ok && diff_ok)) {
        if (failures == 0) {
          first_failure = fmt::format("drift {} vs {}, diffusion {} vs {}",
                                      z.drift, z.drift_inner_product,
                                      z.diffusion, z.diffusion_direct);
        }
        ++failures;
      }
    }
    return CheckResult{"diagnostics: Z drift/diffusion closed forms (1e-12)",
                       failures == 0, static_cast<double>(failures), 0.0,
                       failures == 0 ? fmt::format("{} random states", samples)
                                     : first_failure};
  });
}

CheckResult psi_bound_at_k_log() {
  return timed([] {
    std::size_t failures = 0;
    double worst_ratio = 0.0;
    for (int k = 2; k <= 50; ++k) {
      for (double n : {10.0, 1e4}) {
        for (double delta : {1.0 / n, 0.1}) {
          const PsiParams p(k, n, delta);
          const double L = p.log_ratio();
          const double lhs = psi(k * L, p);
          const double rhs = 6.0 * k * L * std::log1p(k);
          worst_ratio = std::max(worst_ratio, lhs / rhs);
          if (!(lhs <= rhs)) ++failures;
        }
      }
    }
    return CheckResult{"diagnostics: psi(k L) <= 6 k L log(1+k)", failures == 0,
                       worst_ratio, 1.0,
                       "k = 2..50, n in {10, 1e4}, delta in {1/n, 0.1}; measured = max lhs/rhs"};
  });
}

CheckResult psi_second_derivative() {
  return timed([] {
    std::size_t failures = 0;
    double worst_fd = 0.0;
    for (int k : {2, 5, 20, 50}) {
      for (double n : {10.0, 1e4}) {
        for (double delta : {1.0 / n, 0.1}) {
          const PsiParams p(k, n, delta);
          const double L = p.log_ratio();
          const double lo = -L + 1e-3;
          const double hi = k * L;
          for (int i = 0; i <= 200; ++i) {
            const double u = lo + (hi - lo) * i / 200.0;
            const double second = psi_second(u, p);
            if (!(second >= -psi_prime(u, p))) ++failures;
            const double step = 1e-4 * (u + 1.0 + L);
            const double fd = (psi_prime(u + step, p) - psi_prime(u - step, p)) / (2.0 * step);
            worst_fd = std::max(worst_fd, std::fabs(fd - second) / std::fabs(second));
          }
        }
      }
    }
    const bool ok = failures == 0 && worst_fd <= 1e-6;
    return CheckResult{"diagnostics: psi'' >= -psi' and finite-difference psi''",
                       ok, worst_fd, 1e-6,
                       fmt::format("{} inequality failures; measured = max relative FD error",
                                   failures)};
  });
}

CheckResult psi_shape_and_quadrature() {
  return timed([] {
    using boost::math::quadrature::gauss_kronrod;
    std::size_t shape_failures = 0;
    double worst_quad = 0.0;
    for (int k : {2, 10, 50}) {
      for (double n : {10.0, 1e4}) {
        const PsiParams p(k, n, 0.1);
        const double L = p.log_ratio();
        if (psi(0.0, p) != 0.0) ++shape_failures;
        double prev_value = -std::numeric_limits<double>::infinity();
        double prev_slope = std::numeric_limits<double>::infinity();
        const double lo = -L - 0.999;
        const double hi = k * L;
        for (int i = 0; i <= 400; ++i) {
          const double u = lo + (hi - lo) * i / 400.0;
          const double v = psi(u, p);
          const double slope = psi_prime(u, p);
          if (!(v > prev_value) || !(slope < prev_slope) || !(psi_second(u, p) < 0.0)) {
            ++shape_failures;
          }
          prev_value = v;
          prev_slope = slope;
          if (i % 20 == 0 && u != 0.0) {
            const double integral = gauss_kronrod<double, 61>::integrate(
                [&](double x) { return psi_prime(x, p); }, 0.0, u, 15, 1e-14);
            worst_quad = std::max(worst_quad, std::fabs(integral - v) / std::fabs(v));
          }
        }
      }
    }
    const bool ok = shape_failures == 0 && worst_quad <= 1e-8;
    return CheckResult{"diagnostics: psi monotone, concave, equals integral of psi'",
                       ok, worst_quad, 1e-8,
                       fmt::format("{} shape failures; measured = max relative quadrature error",
                                   shape_failures)};
  });
}

CheckResult lemma_pi_sweep(std::size_t samples, std::uint64_t seed) {
  return timed([&] {
    RandomStream rng(seed, stream_tag::kVerify);
    constexpr double kHorizons[] = {10.0, 100.0, 1e4};
    std::size_t tested = 0;
    std::size_t violations = 0;
    std::size_t attempts = 0;
    double worst_ratio = 0.0;
    while (tested < samples) {
      ++attempts;
      const std::size_t k = index_in(rng, 2, 20);
      const double n = kHorizons[index_in(rng, 0, 2)];
      const double delta = rng.uniform() < 0.5 ? 1.0 / n : 0.1;
      const PsiParams p(static_cast<int>(k), n, delta);
      const double L = p.log_ratio();
      std::vector<double> theta(k);
      theta[0] = uniform_in(rng, -1.0, (k - 1) * L);
      const double cap = std::min(theta[0] + 1.0, k * L);
      if (rng.uniform() < 0.3) {
        // Push mass onto the cap: the extremal configuration for 1/pi_0.
        const std::size_t top = index_in(rng, 0, k - 1);
        for (std::size_t a = 1; a < k; ++a) theta[a] = a <= top ? cap : -L;
      } else {
        for (std::size_t a = 1; a < k; ++a) theta[a] = uniform_in(rng, -L, cap);
      }
      // Restore the zero sum by shifting the non-first entries.
      if (k > 1) {
        const double shift = -sum(theta) / static_cast<double>(k - 1);
        for (std::size_t a = 1; a < k; ++a) theta[a] += shift;
      }
      const auto r = check_lemma_pi(theta, p);
      if (!r.applicable) {
        if (attempts > 1000 * samples) break;
        continue;
      }
      ++tested;
      worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
      if (!r.holds) ++violations;
    }
    const bool ok = violations == 0 && tested == samples;
    return CheckResult{"diagnostics: 1/pi_0 bound on admissible states", ok,
                       static_cast<double>(violations), 0.0,
                       fmt::format("{} admissible states ({} drawn), max lhs/rhs = {:.4f}",
                                   tested, attempts, worst_ratio)};
  });
}

CheckResult z_threshold_below_relaxation() {
  return timed([] {
    std::size_t failures = 0;
    std::size_t negative = 0;
    for (double eta : {1e-4, 1e-3, 0.01, 0.05, 0.2, 1.0}) {
      for (double eps : {0.0, 0.1, 0.25, 0.5, 0.9}) {
        for (int i = 0; i <= 2000; ++i) {
          const double s = 80.0 * i / 2000.0;
          const auto z = bounds::z_threshold(s, eta, eps);
          if (z.argument < 0.0) {
            ++negative;
            if (!(z.threshold <= z.relaxation)) ++failures;
          }
        }
      }
    }
    return CheckResult{"bounds: Z threshold <= min(1, log(400/eta) - (1-eps)s)",
                       failures == 0, static_cast<double>(failures), 0.0,
                       fmt::format("{} grid points with negative asinh argument", negative)};
  });
}

CheckResult bounds_monotone() {
  return timed([] {
    std::size_t failures = 0;
    auto expect = [&](bool ok) { failures += ok ? 0 : 1; };
    for (double d2 : {0.05, 0.1, 0.5}) {
      double prev = -1.0;
      for (double n = 1.0; n <= 1e7; n *= 3.0) {
        const double v = bounds::two_arm_regret_bound(d2, d2 / 2.0, n).value;
        expect(v >= prev);
        prev = v;
      }
    }
    for (double n : {3.0, 100.0, 1e6}) {
      double prev = 0.0;
      for (double d2 = 0.01; d2 <= 1.0; d2 += 0.01) {
        const double v = bounds::upper_bound_threshold(d2, n);
        expect(v > prev);
        prev = v;
      }
    }
    for (int k : {2, 5, 20}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double eta = 1e-4; eta <= 10.0; eta *= 2.0) {
        const double v = bounds::upper_bound_regret(k, eta, 1e4).value;
        expect(v < prev);
        prev = v;
      }
    }
    double prev_a = 2.0;
    for (double a = 0.1; a <= 10.0; a += 0.1) {
      const double v = bounds::bm_drift_bound(a, 1.0);
      expect(v < prev_a);
      prev_a = v;
    }
    double prev_n = 0.0;
    for (double n = 0.0; n <= 1e6; n = n * 2.0 + 1.0) {
      const double v = bounds::bm_less_drift_bound(5.0, 1.0, n);
      expect(v > prev_n);
      prev_n = v;
    }
    double prev_s = 0.0;
    for (double n = 1.0; n <= 1e8; n *= 10.0) {
      const double v = bounds::s_max(0.05, n, 0.1);
      expect(v > prev_s);
      prev_s = v;
    }
    return CheckResult{"bounds: monotone in the forced directions", failures == 0,
                       static_cast<double>(failures), 0.0, "grid checks"};
  });
}

CheckResult discrete_conservation(long steps, std::size_t seeds,
                                  unsigned workers) {
  return timed([&] {
    const auto inst = uniform_gap_instance(5, 0.5);
    std::vector<double> drift(seeds);
    parallel_for(seeds, workers, [&](std::size_t i) {
      const auto run = run_discrete(inst, 0.1, steps, i, steps);
      drift[i] = std::fabs(sum(run.final_state.theta));
    });
    const double worst = *std::max_element(drift.begin(), drift.end());
    return CheckResult{"discrete: |sum theta| after many rounds", worst <= 1e-8,
                       worst, 1e-8,
                       fmt::format("{} rounds x {} seeds, k=5, eta=0.1", steps, seeds)};
  });
}

CheckResult continuous_conservation(long steps, std::size_t seeds,
                                    unsigned workers) {
  return timed([&] {
    const auto inst = uniform_gap_instance(5, 0.5);
    std::vector<double> drift(seeds);
    parallel_for(seeds, workers, [&](std::size_t i) {
      SdeConfig cfg;
      cfg.h = 0.01;
      cfg.horizon = cfg.h * static_cast<double>(steps);
      cfg.record_stride = steps;
      const auto run = run_continuous(inst, 0.5, cfg, i);
      drift[i] = std::fabs(sum(run.final_state.theta));
    });
    const double worst = *std::max_element(drift.begin(), drift.end());
    return CheckResult{"continuous: |sum theta| after many Euler steps",
                       worst <= 1e-8, worst, 1e-8,
                       fmt::format("{} steps x {} seeds, k=5, eta=0.5, h=0.01", steps,
                                   seeds)};
  });
}

CheckResult discrete_reproducibility() {
  return timed([] {
    const auto inst = lower_bound_instance(6, 0.05);
    const auto a = run_discrete(inst, 0.2, 5000, 17, 7);
    const auto b = run_discrete(inst, 0.2, 5000, 17, 7);
    const auto c = run_discrete(inst, 0.2, 5000, 18, 7);
    const bool same = a.trajectory == b.trajectory &&
                      a.summary.regret == b.summary.regret &&
                      a.final_state.theta == b.final_state.theta;
    const bool differs = !(a.trajectory == c.trajectory);
    return CheckResult{"discrete: identical inputs give identical runs",
                       same && differs, same ? 0.0 : 1.0, 0.0,
                       differs ? "seed 17 twice equal, seed 18 differs"
                               : "different seeds produced identical runs"};
  });
}

CheckResult discrete_action_frequencies(std::size_t draws, std::uint64_t seed) {
  return timed([&] {
    const BanditInstance inst({1.0, 0.7, 0.4, 0.1}, {1.0, 1.0, 1.0, 1.0});
    PolicyState state = PolicyState::from_theta({1.0, 0.5, 0.0, -1.0});
    const auto pi = state.pi;
    RandomStream rng(seed, stream_tag::kVerify);
    std::vector<double> counts(inst.k(), 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
      counts[step_discrete(state, inst, 0.0, rng).action] += 1.0;
    }
    double worst_z = 0.0;
    const double N = static_cast<double>(draws);
    for (std::size_t a = 0; a < inst.k(); ++a) {
      const double sd = std::sqrt(N * pi[a] * (1.0 - pi[a]));
      worst_z = std::max(worst_z, std::fabs(counts[a] - N * pi[a]) / sd);
    }
    return CheckResult{"discrete: action frequencies match pi (eta = 0)",
                       worst_z <= 3.0, worst_z, 3.0,
                       fmt::format("{} draws; measured = max |z| over arms", draws)};
  });
}

namespace {

// Classical RK4 for the noiseless flow theta' = eta (diag(pi) - pi pi^T) mu.
std::vector<double> gradient_flow_rk4(const BanditInstance& inst, double eta,
                                      double horizon, double step) {
  std::vector<double> theta(inst.k(), 0.0);
  auto field = [&](const std::vector<double>& th) {
    auto g = policy_gradient(th, inst);
    for (double& v : g) v *= eta;
    return g;
  };
  const long steps = std::lround(horizon / step);
  auto axpy = [](std::vector<double> x, const std::vector<double>& y, double c) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * y[i];
    return x;
  };
  for (long i = 0; i < steps; ++i) {
    const auto k1 = field(theta);
    const auto k2 = field(axpy(theta, k1, step / 2.0));
    const auto k3 = field(axpy(theta, k2, step / 2.0));
    const auto k4 = field(axpy(theta, k3, step));
    for (std::size_t a = 0; a < theta.size(); ++a) {
      theta[a] += step / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
  }
  return theta;
}

}  // namespace

CheckResult euler_weak_order() {
  return timed([] {
    const BanditInstance inst({1.0, 0.7, 0.2}, {0.0, 0.0, 0.0});
    constexpr double kEta = 1.0;
    constexpr double kHorizon = 10.0;
    constexpr double kStep = 0.1;
    const auto reference = gradient_flow_rk4(inst, kEta, kHorizon, kStep / 10.0);
    auto error_at = [&](double h) {
      SdeConfig cfg;
      cfg.h = h;
      cfg.horizon = kHorizon;
      cfg.record_stride = 1000000;
      const auto run = run_continuous(inst, kEta, cfg, 1);
      double e = 0.0;
      for (std::size_t a = 0; a < inst.k(); ++a) {
        e = std::max(e, std::fabs(run.final_state.theta[a] - reference[a]));
      }
      return e;
    };
    const double ratio = error_at(kStep) / error_at(kStep / 2.0);
    return CheckResult{"continuous: Euler error halves with h (sigma = 0)",
                       ratio >= 1.7 && ratio <= 2.3, ratio, 2.0,
                       "ratio of terminal errors at h=0.1 and h=0.05; accepted range [1.7, 2.3]"};
  });
}

CheckResult euler_noise_covariance(std::size_t replications,
                                   std::uint64_t seed) {
  return timed([&] {
    const BanditInstance inst({0.9, 0.6, 0.5, 0.2}, {1.0, 0.8, 0.5, 0.3});
    const PolicyState start = PolicyState::from_theta({0.5, 0.0, -0.3, -0.2});
    constexpr double kEta = 0.7;
    constexpr double kStep = 0.01;
    const std::size_t k = inst.k();
    RandomStream rng(seed, stream_tag::kVerify);
    std::vector<std::vector<double>> samples(replications, std::vector<double>(k));
    std::vector<double> mean(k, 0.0);
    for (auto& x : samples) {
      PolicyState s = start;
      step_euler(s, inst, kEta, kStep, rng);
      for (std::size_t a = 0; a < k; ++a) {
        x[a] = (s.theta[a] - start.theta[a]) / std::sqrt(kStep);
        mean[a] += x[a];
      }
    }
    const double N = static_cast<double>(replications);
    for (double& m : mean) m /= N;

    // eta^2 (Id - pi 1^T) diag(pi sigma^2) (Id - 1 pi^T).
    const auto& pi = start.pi;
    std::vector<double> w(k);
    for (std::size_t a = 0; a < k; ++a) w[a] = pi[a] * inst.sigma(a) * inst.sigma(a);
    const double wsum = sum(w);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double expected =
            kEta * kEta * ((i == j ? w[i] : 0.0) - pi[i] * w[j] - pi[j] * w[i] +
                           pi[i] * pi[j] * wsum);
        double acc = 0.0;
        double acc2 = 0.0;
        for (const auto& x : samples) {
          const double p = (x[i] - mean[i]) * (x[j] - mean[j]);
          acc += p;
          acc2 += p * p;
        }
        const double est = acc / N;
        const double se = std::sqrt(std::max(acc2 / N - est * est, 0.0) / N);
        worst = std::max(worst, std::fabs(est - expected) / se);
      }
    }
    return CheckResult{"continuous: per-step noise covariance", worst <= 5.0,
                       worst, 5.0,
                       fmt::format("{} one-step replications; measured = max |z| over entries",
                                   replications)};
  });
}

CheckResult lemma_theta_lower_bound(double eta, std::size_t k, double n,
                                    double delta, double h, std::size_t seeds,
                                    unsigned workers) {
  return timed([&] {
    const auto inst = uniform_gap_instance(k, 0.5);
    const double level = -std::log(n / delta);
    std::vector<char> hit(seeds, 0);
    parallel_for(seeds, workers, [&](std::size_t i) {
      SdeConfig cfg;
      cfg.h = h;
      cfg.horizon = n;
      cfg.record_stride = 1 << 30;
      hit[i] = run_continuous(inst, eta, cfg, i).summary.min_theta <= level;
    });
    const double freq =
        static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / seeds;
    const double threshold = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / seeds);
    return CheckResult{
        "continuous: P(inf theta_a <= -log(n/delta)) <= delta", freq <= threshold,
        freq, threshold,
        fmt::format("eta={}, k={}, n={}, delta={}, h={}, {} seeds", eta, k, n,
                    delta, h, seeds)};
  });
}

CheckResult lemma_z_lower_bound(std::size_t k, double gap, double n,
                                double delta, double h, std::size_t seeds,
                                unsigned workers) {
  return timed([&] {
    const auto inst = uniform_gap_instance(k, gap);
    const double eta = gap * gap / (8.0 * std::log(2.0 * n / delta));
    std::vector<char> hit(seeds, 0);
    parallel_for(seeds, workers, [&](std::size_t i) {
      SdeConfig cfg;
      cfg.h = h;
      cfg.horizon = n;
      cfg.record_stride = 1 << 30;
      hit[i] = run_continuous(inst, eta, cfg, i).summary.min_Z <= -gap / 2.0;
    });
    const double freq =
        static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / seeds;
    const double threshold = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / seeds);
    return CheckResult{
        "continuous: P(inf Z_a <= -delta2/2) <= delta", freq <= threshold, freq,
        threshold,
        fmt::format("eta={:.4g}, k={}, gap={}, n={}, delta={}, h={}, {} seeds",
                    eta, k, gap, n, delta, h, seeds)};
  });
}

CheckResult drifted_bm_hitting(std::size_t seeds, unsigned workers) {
  return timed([&] {
    const auto est = estimate_hitting_prob(HittingKind::kDriftedBm, 1.0, 1.0,
                                           20.0, 1e-3, seeds, 0, workers);
    const bool ok = est.p_hat >= 0.105 && est.p_hat <= 0.150;
    return CheckResult{"hitting: drifted BM a=1, eps=1 in [0.105, 0.150]", ok,
                       est.p_hat, bounds::bm_drift_bound(1.0, 1.0),
                       fmt::format("{} seeds, horizon 20, h=1e-3, se={:.4f}; threshold = exp(-2)",
                                   seeds, est.se)};
  });
}

CheckResult drifted_bm_below_bound(std::size_t seeds, unsigned workers) {
  return timed([&] {
    const double a = 0.5;
    const double eps = 1.0;
    const auto est = estimate_hitting_prob(HittingKind::kDriftedBm, a, eps, 10.0,
                                           1e-3, seeds, 0, workers);
    const double bound = bounds::bm_drift_bound(a, eps);
    const double threshold = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / seeds);
    return CheckResult{"hitting: drifted BM a=0.5, eps=1 below exp(-2 a eps)",
                       est.p_hat <= threshold, est.p_hat, threshold,
                       fmt::format("{} seeds, horizon 10, h=1e-3", seeds)};
  });
}

CheckResult sigmoid_zero_drift_reflection(std::size_t seeds, unsigned workers) {
  return timed([&] {
    const auto est = estimate_hitting_prob(HittingKind::kSigmoidDrift, 0.0, 1.0,
                                           1.0, 1e-4, seeds, 0, workers);
    const double exact = 2.0 * normal_cdf(-1.0);
    const double gap = std::fabs(est.p_hat - exact);
    return CheckResult{"hitting: sigmoid drift a=0 matches 2 Phi(-1) within 0.015",
                       gap <= 0.015, est.p_hat, exact,
                       fmt::format("{} seeds, horizon 1, h=1e-4, |diff|={:.4f}", seeds, gap)};
  });
}

CheckResult sigmoid_strong_drift_no_hits(std::size_t seeds, unsigned workers) {
  return timed([&] {
    const auto est = estimate_hitting_prob(HittingKind::kSigmoidDrift, 50.0, 1.0,
                                           100.0, 1e-2, seeds, 0, workers);
    return CheckResult{"hitting: sigmoid drift a=50, eps=1, horizon 100 never hits",
                       est.hits == 0, static_cast<double>(est.hits), 0.0,
                       fmt::format("{} seeds, h=1e-2, bound {:.3g}", seeds,
                                   bounds::bm_less_drift_bound(50.0, 1.0, 100.0))};
  });
}

bool is_known_suite(const std::string& suite) {
  return suite == "identities" || suite == "lemmas" || suite == "hitting" ||
         suite == "all";
}

std::vector<CheckResult> run_suite(const std::string& suite,
                                   const SuiteOptions& opts) {
  if (!is_known_suite(suite)) {
    throw std::invalid_argument("unknown verification suite '" + suite + "'");
  }
  const bool all = suite == "all";
  const double b = opts.budget;
  std::vector<CheckResult> out;
  if (all || suite == "identities") {
    out.push_back(gradient_vs_finite_differences(scaled(1000, b), 1));
    out.push_back(softmax_shift_invariance(scaled(1000, b), 2));
    out.push_back(gradient_orthogonality(scaled(1000, b), 3));
    out.push_back(regret_non_negative(scaled(1000, b), 4));
    out.push_back(lower_sde_identities(scaled(10000, b), 5));
    out.push_back(z_coefficient_identities(scaled(10000, b), 6));
    out.push_back(psi_bound_at_k_log());
    out.push_back(psi_second_derivative());
    out.push_back(psi_shape_and_quadrature());
    out.push_back(lemma_pi_sweep(scaled(100000, b), 7));
    out.push_back(z_threshold_below_relaxation());
    out.push_back(bounds_monotone());
  }
  if (all || suite == "lemmas") {
    const std::size_t lemma_seeds = std::max<std::size_t>(50, opts.seeds / 20);
    const long steps = static_cast<long>(scaled(1e6, b));
    out.push_back(discrete_conservation(steps, 10, opts.workers));
    out.push_back(continuous_conservation(steps, 10, opts.workers));
    out.push_back(discrete_reproducibility());
    out.push_back(discrete_action_frequencies(scaled(1e5, b), 8));
    out.push_back(euler_weak_order());
    out.push_back(euler_noise_covariance(scaled(1e5, b), 9));
    out.push_back(lemma_theta_lower_bound(0.5, 5, 100.0, 0.2, 0.01, lemma_seeds,
                                          opts.workers));
    out.push_back(lemma_z_lower_bound(5, 0.5, 100.0, 0.1, 0.01, lemma_seeds,
                                      opts.workers));
  }
  if (all || suite == "hitting") {
    out.push_back(drifted_bm_hitting(opts.seeds, opts.workers));
    out.push_back(drifted_bm_below_bound(opts.seeds, opts.workers));
    out.push_back(sigmoid_zero_drift_reflection(opts.seeds, opts.workers));
    out.push_back(sigmoid_strong_drift_no_hits(opts.seeds, opts.workers));
  }
  return out;
}

}  // namespace pglab::verify
