#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ksc::cli {

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_lo;  // whisker extents; empty disables whiskers
  std::vector<double> y_hi;
};

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  std::vector<std::pair<double, std::string>> ticks;
  std::string label;
};

// Self-contained SVG line chart: one polyline per series, point markers,
// optional min-max whiskers, legend at the right edge. Output bytes depend
// only on the arguments.
std::string render_line_plot(const std::string& title,
                             const std::vector<SvgSeries>& series,
                             const AxisSpec& x_axis, const AxisSpec& y_axis);

void write_line_plot(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series,
                     const AxisSpec& x_axis, const AxisSpec& y_axis);

}  // namespace ksc::cli
