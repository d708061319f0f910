#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "pglab/svg_plot.hpp"

using namespace pglab::plot;
namespace fs = std::filesystem;

namespace {

fs::path write_traj(const fs::path& dir, const std::string& name, double scale) {
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << "t,pi1,Z_min,S,s,regret\n";
  for (int i = 0; i <= 10; ++i) {
    out << i * 10 << ',' << 0.5 + scale * i / 40.0 << ",0,0,0," << i << '\n';
  }
  return p;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("glob, load and render") {
  const fs::path dir = fs::path(PGLAB_TEST_TMP) / "svg";
  fs::remove_all(dir);
  write_traj(dir, "traj_eta0.1_seed0.csv", 1.0);
  write_traj(dir, "traj_eta0.1_seed1.csv", -1.0);
  write_traj(dir, "traj_eta0.02_seed0.csv", 0.5);

  const auto files = expand_glob((dir / "traj_eta*_seed*.csv").string());
  REQUIRE(files.size() == 3);
  CHECK(expand_glob((dir / "nothing*.csv").string()).empty());

  std::vector<Series> series;
  for (const auto& f : files) series.push_back(load_series(f, "pi1"));
  CHECK(series[0].eta == doctest::Approx(0.02));
  CHECK(series[0].x.size() == 11);
  CHECK(series[1].y.back() == doctest::Approx(0.75));

  PlotOptions opts;
  const auto svg = render_svg(series, opts);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "<polyline") == 3);
  CHECK(count(svg, "<g>") == 2);
  CHECK(svg.find("eta = 0.02") < svg.find("eta = 0.1"));
  CHECK(svg == render_svg(series, opts));

  opts.log_x = true;
  const auto logsvg = render_svg(series, opts);
  CHECK(logsvg.find("t (log scale)") != std::string::npos);

  CHECK_THROWS_AS(load_series(files[0], "nope"), PlotError);
  CHECK_THROWS_AS(load_series((dir / "missing.csv").string(), "pi1"), PlotError);
  CHECK_THROWS_AS(render_svg({}, opts), PlotError);
}

TEST_CASE("files without an eta in the name share one panel") {
  const fs::path dir = fs::path(PGLAB_TEST_TMP) / "svg_plain";
  fs::remove_all(dir);
  const auto p = write_traj(dir, "run.csv", 1.0);
  const auto s = load_series(p.string(), "regret");
  const auto svg = render_svg({s}, PlotOptions{});
  CHECK(count(svg, "<g>") == 1);
  CHECK(svg.find("all trajectories") != std::string::npos);
}
