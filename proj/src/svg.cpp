#include "latdyn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "latdyn/csv.hpp"

namespace latdyn {

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<SvgSeries>& series, int width, int height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("svg: cannot open '" + path + "'");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const SvgSeries& s : series) {
    for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
    for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
  }
  if (!(x_max > x_min)) { x_min = 0; x_max = 1; }
  if (!(y_max > y_min)) { y_min -= 0.5; y_max += 0.5; }

  const double ml = 60, mr = 20, mt = 30, mb = 30;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"4\" y=\"" << py(y_min) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(y_min) << "</text>\n";
  out << "<text x=\"4\" y=\"" << py(y_max) + 10
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(y_max)
      << "</text>\n";

  int legend_x = static_cast<int>(ml) + 10;
  for (const SvgSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    // Thin dense traces so files stay small.
    const std::size_t stride = std::max<std::size_t>(1, n / 4000);
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << format_double(px(s.x[i])) << ',' << format_double(py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << legend_x << "\" y=\"" << mt + ph + 22
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << s.color << "\">"
        << s.label << "</text>\n";
    legend_x += static_cast<int>(s.label.size()) * 7 + 24;
  }
  out << "</svg>\n";
}

}  // namespace latdyn
