#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pglab::plot {

/// Missing files, bad headers or an unknown field.
class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Series {
  std::string source;
  /// Parsed from "traj_eta<eta>_seed<seed>.csv"; NaN when the name differs.
  double eta;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string field = "pi1";
  bool log_x = false;
  double alpha = 0.3;
  int panel_width = 360;
  int panel_height = 240;
  int columns = 3;
};

/// Sorted paths matching a shell glob. Empty when nothing matches.
std::vector<std::string> expand_glob(const std::string& pattern);

/// Reads column t and `field` from a trajectory CSV.
Series load_series(const std::string& path, const std::string& field);

/// One panel per distinct eta (ascending), every series drawn as a polyline.
std::string render_svg(const std::vector<Series>& series,
                       const PlotOptions& opts);

}  // namespace pglab::plot
