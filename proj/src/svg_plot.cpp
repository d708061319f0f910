#include "pglab/svg_plot.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

#include <fmt/format.h>

namespace pglab::plot {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_eta(const std::string& path) {
  static const std::regex kName(R"(traj_eta([^_/]+)_seed[^/]*\.csv$)");
  std::smatch m;
  if (!std::regex_search(path, m, kName)) return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(m[1].str());
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string panel_title(double eta) {
  return std::isnan(eta) ? std::string("all trajectories")
                         : fmt::format("eta = {}", eta);
}

}  // namespace

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

Series load_series(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw PlotError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw PlotError(path + ": empty file");
  const auto header = split_csv_line(line);
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw PlotError(path + ": no column '" + name + "' in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t tx = col("t");
  const std::size_t fy = col(field);
  Series s{path, parse_eta(path), {}, {}};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw PlotError(path + ": ragged row");
    s.x.push_back(std::stod(cells[tx]));
    s.y.push_back(std::stod(cells[fy]));
  }
  return s;
}

std::string render_svg(const std::vector<Series>& series,
                       const PlotOptions& opts) {
  if (series.empty()) throw PlotError("nothing to plot");
  // NaN keys sort last; std::map needs a strict order, so key on a pair.
  std::map<std::pair<bool, double>, std::vector<const Series*>> panels;
  for (const auto& s : series) {
    panels[{std::isnan(s.eta), std::isnan(s.eta) ? 0.0 : s.eta}].push_back(&s);
  }
  auto tx = [&](double x) { return opts.log_x ? std::log10(x) : x; };

  Range xr;
  Range yr;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (opts.log_x && !(s.x[i] > 0.0)) continue;
      if (!std::isfinite(s.y[i])) continue;
      xr.add(tx(s.x[i]));
      yr.add(s.y[i]);
    }
  }
  xr.pad();
  yr.pad();

  const int cols = std::max(1, std::min<int>(opts.columns, static_cast<int>(panels.size())));
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const int W = opts.panel_width;
  const int H = opts.panel_height;
  constexpr int kLeft = 50, kRight = 15, kTop = 25, kBottom = 40;
  const int pw = W - kLeft - kRight;
  const int ph = H - kTop - kBottom;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W * cols, H * rows, W * cols, H * rows);

  int index = 0;
  for (const auto& [key, members] : panels) {
    const int ox = (index % cols) * W + kLeft;
    const int oy = (index / cols) * H + kTop;
    ++index;
    auto px = [&](double x) { return ox + (tx(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return oy + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    svg += fmt::format("<g>\n<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       ox + pw / 2, oy - 8,
                       panel_title(key.first ? std::nan("") : key.second));
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        ox, oy, pw, ph);
    for (int i = 0; i <= 4; ++i) {
      const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
      const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
      const double label_x = opts.log_x ? std::pow(10.0, fx) : fx;
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n",
                         ox + pw * i / 4.0, oy + ph + 14, label_x);
      svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                         ox - 4, oy + ph - ph * i / 4.0 + 4, fy);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       ox + pw / 2, oy + ph + 30, opts.log_x ? "t (log scale)" : "t");
    svg += fmt::format(
        "<text transform=\"translate({},{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
        ox - 38, oy + ph / 2, opts.field);
    for (const Series* s : members) {
      std::string points;
      for (std::size_t i = 0; i < s->x.size(); ++i) {
        if (opts.log_x && !(s->x[i] > 0.0)) continue;
        if (!std::isfinite(s->y[i])) continue;
        if (!points.empty()) points += ' ';
        points += fmt::format("{:.2f},{:.2f}", px(s->x[i]), py(s->y[i]));
      }
      svg += fmt::format(
          "<polyline fill=\"none\" stroke=\"steelblue\" stroke-opacity=\"{}\" "
          "stroke-width=\"1\" points=\"{}\"/>\n",
          opts.alpha, points);
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace pglab::plot
