// Hand-emitted SVG polyline charts; no plotting dependency, diffable output.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/errors.hpp"

namespace heunflow::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

}  // namespace detail

inline void write_line_chart(std::ostream& os, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series, bool log_x = false,
                             bool log_y = false) {
  const double width = 820, height = 520;
  const double left = 70, right = 790, top = 46, bottom = 470;

  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - (ty(y) - ymin) / (ymax - ymin) * (bottom - top); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
     << "\" font-family=\"sans-serif\" font-size=\"13\">\n"
     << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
     << "<text x=\"" << (width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << title << "</text>\n";

  // Axes and ticks.
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
     << bottom << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double gx = left + (right - left) * i / 5.0;
    const double gy = bottom - (bottom - top) * i / 5.0;
    os << "<line x1=\"" << gx << "\" y1=\"" << bottom << "\" x2=\"" << gx << "\" y2=\""
       << (bottom + 5) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << gx << "\" y=\"" << (bottom + 20) << "\" text-anchor=\"middle\">"
       << detail::fmt(log_x ? std::pow(10.0, fx) : fx) << "</text>\n"
       << "<line x1=\"" << (left - 5) << "\" y1=\"" << gy << "\" x2=\"" << left << "\" y2=\""
       << gy << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << (left - 9) << "\" y=\"" << (gy + 4)
       << "\" text-anchor=\"end\">" << detail::fmt(log_y ? std::pow(10.0, fy) : fy)
       << "</text>\n";
  }
  os << "<text x=\"" << ((left + right) / 2) << "\" y=\"" << (height - 8)
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
     << "<text x=\"16\" y=\"" << ((top + bottom) / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << ((top + bottom) / 2) << ")\">"
     << ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    if (s.points.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << detail::color(si)
       << "\" stroke-width=\"1.6\" points=\"";
    for (auto [x, y] : s.points) os << detail::fmt(px(x)) << ',' << detail::fmt(py(y)) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << (right - 150) << "\" y=\"" << (top + 18.0 * si + 6) << "\" fill=\""
       << detail::color(si) << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series, bool log_x = false,
                             bool log_y = false) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_line_chart(os, title, xlabel, ylabel, series, log_x, log_y);
}

}  // namespace heunflow::svg
