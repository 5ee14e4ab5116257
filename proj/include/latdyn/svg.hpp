#pragma once

#include <string>
#include <vector>

namespace latdyn {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart for eyeballing runs; one polyline per series with a
/// legend and axis extents. Not a plotting library.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<SvgSeries>& series, int width = 960,
                          int height = 320);

}  // namespace latdyn
