#include "ritz/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ritz/error.hpp"

namespace ritz::io {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& line : plot.lines) {
    for (const auto& [x, y] : line.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) throw ConfigError("cannot plot a non-finite point");
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) throw ConfigError("nothing to plot");
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double margin = 40.0;
  const double sx = (plot.width - 2 * margin) / (xmax - xmin);
  const double sy = (plot.height - 2 * margin) / (ymax - ymin);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(plot.width) + "\" height=\"" +
                    fixed(plot.height) + "\" viewBox=\"0 0 " + fixed(plot.width) + " " + fixed(plot.height) +
                    "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fixed(plot.width) + "\" height=\"" + fixed(plot.height) +
         "\" fill=\"white\"/>\n";
  if (!plot.title.empty()) {
    out += "<text x=\"" + fixed(margin) + "\" y=\"" + fixed(0.6 * margin) +
           "\" font-family=\"sans-serif\" font-size=\"14\">" + escape(plot.title) + "</text>\n";
  }
  for (const auto& line : plot.lines) {
    out += "<polyline fill=\"none\" stroke=\"" + line.stroke + "\" stroke-width=\"" + fixed(line.width) +
           "\" points=\"";
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      const double px = margin + (line.points[i].first - xmin) * sx;
      const double py = plot.height - margin - (line.points[i].second - ymin) * sy;
      out += (i ? " " : "") + fixed(px) + "," + fixed(py);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<Polyline> contour_segments(const std::function<double(double, double)>& f, double x0, double x1,
                                       double y0, double y1, std::size_t n, const std::vector<double>& levels,
                                       const std::string& stroke) {
  if (n < 2) throw ConfigError("contour lattice needs at least 2 points per side");
  std::vector<double> v(n * n);
  auto xat = [&](std::size_t i) { return x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1); };
  auto yat = [&](std::size_t j) { return y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(n - 1); };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) v[j * n + i] = f(xat(i), yat(j));

  std::vector<Polyline> out;
  for (double level : levels) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        // Corners counter-clockwise from (i, j); crossings on each edge.
        const std::pair<double, double> p[4] = {{xat(i), yat(j)}, {xat(i + 1), yat(j)},
                                                {xat(i + 1), yat(j + 1)}, {xat(i), yat(j + 1)}};
        const double c[4] = {v[j * n + i], v[j * n + i + 1], v[(j + 1) * n + i + 1], v[(j + 1) * n + i]};
        std::vector<std::pair<double, double>> hits;
        for (int e = 0; e < 4; ++e) {
          const double a = c[e] - level, b = c[(e + 1) % 4] - level;
          if ((a < 0) != (b < 0)) {
            const double s = a / (a - b);
            const auto& pa = p[e];
            const auto& pb = p[(e + 1) % 4];
            hits.push_back({pa.first + s * (pb.first - pa.first), pa.second + s * (pb.second - pa.second)});
          }
        }
        for (std::size_t h = 0; h + 1 < hits.size(); h += 2) out.push_back({{hits[h], hits[h + 1]}, stroke, 0.5});
      }
    }
  }
  return out;
}

}  // namespace ritz::io
