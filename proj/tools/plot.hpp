#pragma once

#include <manifold_descent/integrate.hpp>

#include <string>
#include <vector>

namespace manifold_descent::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label = "f(x(t))";
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Standalone SVG line chart. Coordinates are printed with fixed precision,
/// so identical input yields identical bytes. With log_y, non-positive
/// values are clipped to 1e-300 before taking log10.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// t against f(x(t)); against f - f* when log_y is set.
PlotSeries objective_series(const Trajectory& traj, const std::string& label, bool log_y);

}  // namespace manifold_descent::cli
