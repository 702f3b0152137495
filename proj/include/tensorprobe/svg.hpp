#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "tensorprobe/csv.hpp"
#include "tensorprobe/errors.hpp"

namespace tensorprobe {

// Minimal deterministic SVG charts. The root <svg> carries data-xmin/xmax/
// ymin/ymax attributes and every point is emitted with full round-trip
// precision, so plotted coordinates can be inverse-mapped back to the data.

struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct SvgBandSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> lo;   // lower band edge
  std::vector<double> mid;  // drawn as the center line
  std::vector<double> hi;   // upper band edge
};

namespace detail {

constexpr double kSvgWidth = 720.0;
constexpr double kSvgHeight = 480.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 56.0;

inline const char* series_color(std::size_t i) {
  static const char* kColors[] = {"#1f6fb2", "#d1495b", "#3d8f5f", "#8e5fa8",
                                  "#c07f2a", "#4f7a8c"};
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

struct AxisRange {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

  double px(double x) const {
    return kMarginLeft + (x - xmin) / (xmax - xmin) * (kSvgWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kMarginTop + (ymax - y) / (ymax - ymin) * (kSvgHeight - kMarginTop - kMarginBottom);
  }
};

inline void widen(AxisRange& r) {
  if (r.xmax <= r.xmin) r.xmax = r.xmin + 1.0;
  if (r.ymax <= r.ymin) r.ymax = r.ymin + (r.ymin == 0.0 ? 1.0 : std::abs(r.ymin) * 0.5);
}

inline void open_svg(std::ostream& os, const AxisRange& r, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSvgWidth << "\" height=\""
     << kSvgHeight << "\" viewBox=\"0 0 " << kSvgWidth << " " << kSvgHeight << "\""
     << " data-xmin=\"" << format_double(r.xmin) << "\" data-xmax=\"" << format_double(r.xmax)
     << "\" data-ymin=\"" << format_double(r.ymin) << "\" data-ymax=\"" << format_double(r.ymax)
     << "\">\n";
  os << "<rect width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" fill=\"white\"/>\n";
  const double x0 = kMarginLeft, x1 = kSvgWidth - kMarginRight;
  const double y0 = kSvgHeight - kMarginBottom, y1 = kMarginTop;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (kSvgWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<text x=\"" << (kSvgWidth / 2) << "\" y=\"" << (kSvgHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (kSvgHeight / 2)
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (kSvgHeight / 2) << ")\">" << ylabel << "</text>\n";
  os << "<text x=\"" << x0 << "\" y=\"" << (y0 + 16) << "\" font-size=\"10\" text-anchor=\"middle\">"
     << format_double(r.xmin) << "</text>\n";
  os << "<text x=\"" << x1 << "\" y=\"" << (y0 + 16) << "\" font-size=\"10\" text-anchor=\"middle\">"
     << format_double(r.xmax) << "</text>\n";
  os << "<text x=\"" << (x0 - 6) << "\" y=\"" << (y0 + 4) << "\" font-size=\"10\" text-anchor=\"end\">"
     << format_double(r.ymin) << "</text>\n";
  os << "<text x=\"" << (x0 - 6) << "\" y=\"" << (y1 + 4) << "\" font-size=\"10\" text-anchor=\"end\">"
     << format_double(r.ymax) << "</text>\n";
}

inline void emit_points(std::ostream& os, const AxisRange& r, const std::vector<double>& xs,
                        const std::vector<double>& ys, bool reversed = false) {
  const std::size_t n = xs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = reversed ? n - 1 - k : k;
    if (k) os << ' ';
    os << format_double(r.px(xs[i])) << ',' << format_double(r.py(ys[i]));
  }
}

inline void emit_legend(std::ostream& os, const std::vector<std::string>& labels) {
  double y = kMarginTop + 8.0;
  for (std::size_t i = 0; i < labels.size(); ++i, y += 16.0) {
    const double x = kSvgWidth - kMarginRight - 150.0;
    os << "<line x1=\"" << x << "\" y1=\"" << (y - 4) << "\" x2=\"" << (x + 22) << "\" y2=\""
       << (y - 4) << "\" stroke=\"" << series_color(i) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << (x + 28) << "\" y=\"" << y << "\" font-size=\"11\">" << labels[i]
       << "</text>\n";
  }
}

}  // namespace detail

inline void write_line_chart(std::ostream& os, const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<SvgSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_line_chart: no series");
  detail::AxisRange r;
  r.xmin = r.ymin = std::numeric_limits<double>::infinity();
  r.xmax = r.ymax = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size() || s.xs.empty())
      throw std::invalid_argument("write_line_chart: series needs matching nonempty xs/ys");
    for (double x : s.xs) { r.xmin = std::min(r.xmin, x); r.xmax = std::max(r.xmax, x); }
    for (double y : s.ys) { r.ymin = std::min(r.ymin, y); r.ymax = std::max(r.ymax, y); }
  }
  r.ymin = std::min(r.ymin, 0.0);
  detail::widen(r);
  detail::open_svg(os, r, title, xlabel, ylabel);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << "<polyline class=\"series\" data-label=\"" << series[i].label
       << "\" fill=\"none\" stroke=\"" << detail::series_color(i) << "\" stroke-width=\"2\" points=\"";
    detail::emit_points(os, r, series[i].xs, series[i].ys);
    os << "\"/>\n";
    labels.push_back(series[i].label);
  }
  detail::emit_legend(os, labels);
  os << "</svg>\n";
}

inline void write_band_chart(std::ostream& os, const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<SvgBandSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_band_chart: no series");
  detail::AxisRange r;
  r.xmin = r.ymin = std::numeric_limits<double>::infinity();
  r.xmax = r.ymax = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.xs.empty() || s.xs.size() != s.lo.size() || s.xs.size() != s.mid.size() ||
        s.xs.size() != s.hi.size())
      throw std::invalid_argument("write_band_chart: series needs matching nonempty columns");
    for (double x : s.xs) { r.xmin = std::min(r.xmin, x); r.xmax = std::max(r.xmax, x); }
    for (std::size_t k = 0; k < s.xs.size(); ++k) {
      r.ymin = std::min({r.ymin, s.lo[k], s.mid[k], s.hi[k]});
      r.ymax = std::max({r.ymax, s.lo[k], s.mid[k], s.hi[k]});
    }
  }
  detail::widen(r);
  detail::open_svg(os, r, title, xlabel, ylabel);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    os << "<polygon class=\"band\" data-label=\"" << s.label << "\" fill=\""
       << detail::series_color(i) << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    detail::emit_points(os, r, s.xs, s.hi);
    os << ' ';
    detail::emit_points(os, r, s.xs, s.lo, /*reversed=*/true);
    os << "\"/>\n";
    os << "<polyline class=\"mid\" data-label=\"" << s.label << "\" fill=\"none\" stroke=\""
       << detail::series_color(i) << "\" stroke-width=\"2\" points=\"";
    detail::emit_points(os, r, s.xs, s.mid);
    os << "\"/>\n";
    labels.push_back(s.label);
  }
  detail::emit_legend(os, labels);
  os << "</svg>\n";
}

inline void write_line_chart_file(const std::string& path, const std::string& title,
                                  const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<SvgSeries>& series) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_line_chart(os, title, xlabel, ylabel, series);
  if (!os) throw IoError("failed writing '" + path + "'");
}

inline void write_band_chart_file(const std::string& path, const std::string& title,
                                  const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<SvgBandSeries>& series) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_band_chart(os, title, xlabel, ylabel, series);
  if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace tensorprobe
