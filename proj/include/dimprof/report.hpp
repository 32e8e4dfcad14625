#pragma once

// Experiment result tables and their SVG rendering: a log2-count scatter with
// fitted lines, and the (ubd, ad) region diagram for lines in the plane.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dimprof/bounds.hpp"
#include "dimprof/io.hpp"

namespace dimprof {

struct FittedLine {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;
};

struct ExperimentResult {
  std::string name;                  // file stem
  CsvRow header;
  std::vector<CsvRow> rows;
  std::vector<XYPair> series;        // (k, log2 count)
  std::vector<FittedLine> fits;
  std::optional<XYPair> region_point;  // (ubd, ad) marker on the region diagram
};

namespace detail {

inline std::string svg_num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

struct Panel {
  double left, top, width, height;
  double x0, x1, y0, y1;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline void svg_axes(std::ostringstream& s, const Panel& p, const std::string& xlabel, const std::string& ylabel) {
  s << "<rect x=\"" << svg_num(p.left) << "\" y=\"" << svg_num(p.top) << "\" width=\"" << svg_num(p.width)
    << "\" height=\"" << svg_num(p.height) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = p.x0 + (p.x1 - p.x0) * i / 4.0;
    const double yv = p.y0 + (p.y1 - p.y0) * i / 4.0;
    s << "<text x=\"" << svg_num(p.px(xv)) << "\" y=\"" << svg_num(p.top + p.height + 14)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << svg_num(xv) << "</text>\n";
    s << "<text x=\"" << svg_num(p.left - 4) << "\" y=\"" << svg_num(p.py(yv) + 3)
      << "\" font-size=\"10\" text-anchor=\"end\">" << svg_num(yv) << "</text>\n";
  }
  s << "<text x=\"" << svg_num(p.left + p.width / 2) << "\" y=\"" << svg_num(p.top + p.height + 30)
    << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  s << "<text x=\"" << svg_num(p.left - 34) << "\" y=\"" << svg_num(p.top + p.height / 2)
    << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " << svg_num(p.left - 34) << ' '
    << svg_num(p.top + p.height / 2) << ")\">" << ylabel << "</text>\n";
}

inline std::string polyline(const Panel& p, const std::vector<XYPair>& pts, const std::string& style) {
  std::string out = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out += (i ? " " : "") + svg_num(p.px(pts[i].x)) + "," + svg_num(p.py(pts[i].y));
  return out + "\"/>\n";
}

}  // namespace detail

/// (2x+2)/(x+2): the threshold curve for m = 1, n = 2.
inline double region_curve(double x) { return threshold_curve(x, 1, 2); }

/// Standalone SVG: scatter of the series with fitted lines on the left and
/// the region diagram for m = 1, n = 2 on the right.
inline std::string render_svg(const ExperimentResult& result) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"400\" viewBox=\"0 0 880 400\">\n";
  s << "<rect width=\"880\" height=\"400\" fill=\"#fff\"/>\n";
  s << "<text x=\"440\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << result.name << "</text>\n";

  // Scatter panel.
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!result.series.empty()) {
    x0 = x1 = result.series.front().x;
    y0 = y1 = result.series.front().y;
    for (const auto& p : result.series) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
  }
  const detail::Panel scatter{60, 40, 340, 300, x0, x1, y0, y1};
  detail::svg_axes(s, scatter, "k", "log2 count");
  for (const auto& p : result.series)
    s << "<circle cx=\"" << detail::svg_num(scatter.px(p.x)) << "\" cy=\"" << detail::svg_num(scatter.py(p.y))
      << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  const char* colours[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t i = 0; i < result.fits.size(); ++i) {
    const auto& f = result.fits[i];
    auto clamp_y = [&](double x) { return std::clamp(f.intercept + f.slope * x, y0, y1); };
    s << detail::polyline(scatter, {{x0, clamp_y(x0)}, {x1, clamp_y(x1)}},
                          std::string("stroke=\"") + colours[i % 4] + "\"");
    s << "<text x=\"" << detail::svg_num(scatter.left + 6) << "\" y=\"" << detail::svg_num(scatter.top + 14 + 14.0 * i)
      << "\" font-size=\"11\" fill=\"" << colours[i % 4] << "\">" << f.label << " slope "
      << detail::svg_num(f.slope) << "</text>\n";
  }

  // Region panel on [0,2]^2: ubd horizontally, ad vertically.
  const detail::Panel region{500, 40, 340, 300, 0, 2, 0, 2};
  detail::svg_axes(s, region, "ubd F", "ad F");
  std::vector<XYPair> curve;
  for (int i = 0; i <= 50; ++i) curve.push_back({i / 50.0, region_curve(i / 50.0)});
  s << detail::polyline(region, curve, "stroke=\"#d62728\" stroke-width=\"2\"");
  s << detail::polyline(region, {{0, 1}, {1, 1}}, "stroke=\"#000\"");
  s << detail::polyline(region, {{0, 0}, {2, 2}}, "stroke=\"#000\"");
  s << detail::polyline(region, {{1, 1}, {1, region_curve(1)}}, "stroke=\"#000\" stroke-dasharray=\"4 3\"");
  auto label = [&](double x, double y, const char* text) {
    s << "<text x=\"" << detail::svg_num(region.px(x)) << "\" y=\"" << detail::svg_num(region.py(y))
      << "\" font-size=\"12\" text-anchor=\"middle\">" << text << "</text>\n";
  };
  label(0.35, 1.75, "(i)");
  label(0.55, 1.18, "(ii)");
  label(0.35, 0.6, "(iii)");
  label(1.5, 0.6, "(iv)");
  if (result.region_point)
    s << "<circle cx=\"" << detail::svg_num(region.px(result.region_point->x)) << "\" cy=\""
      << detail::svg_num(region.py(result.region_point->y)) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  s << "</svg>\n";
  return s.str();
}

/// Writes <name>.csv and <name>.svg for every result into `out_dir`. With no
/// results only a header line is written to report.csv.
inline std::vector<std::string> emit_report(const std::vector<ExperimentResult>& results, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
  std::vector<std::string> written;
  if (results.empty()) {
    std::ostringstream csv;
    write_csv(csv, {"experiment", "k", "log2_count"}, {});
    const auto path = (std::filesystem::path(out_dir) / "report.csv").string();
    write_file(path, csv.str());
    written.push_back(path);
    return written;
  }
  for (const auto& result : results) {
    require(!result.name.empty(), "report: experiment name must be non-empty");
    std::ostringstream csv;
    write_csv(csv, result.header, result.rows);
    const auto stem = std::filesystem::path(out_dir) / result.name;
    written.push_back(stem.string() + ".csv");
    write_file(written.back(), csv.str());
    written.push_back(stem.string() + ".svg");
    write_file(written.back(), render_svg(result));
  }
  return written;
}

}  // namespace dimprof
