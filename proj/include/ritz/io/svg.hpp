#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ritz::io {

struct Polyline {
  std::vector<std::pair<double, double>> points;
  std::string stroke = "#1f4e79";
  double width = 1.5;
};

// Minimal line plot. Data coordinates are mapped onto the canvas from the
// bounding box of all lines; coordinates are printed with fixed precision so
// the output is byte-identical for identical input.
struct SvgPlot {
  double width = 640.0;
  double height = 480.0;
  std::string title;
  std::vector<Polyline> lines;
};

std::string render_svg(const SvgPlot& plot);

// Level-set segments of f on [x0, x1] × [y0, y1] by marching squares on an
// n × n lattice, one polyline per segment.
std::vector<Polyline> contour_segments(const std::function<double(double, double)>& f, double x0, double x1,
                                       double y0, double y1, std::size_t n, const std::vector<double>& levels,
                                       const std::string& stroke);

}  // namespace ritz::io
