#include "ritz/metrics/refractive.hpp"

#include <algorithm>
#include <numbers>

namespace ritz::metrics {

Point3 helix_axis(double s, double radius) {
  const double pi = std::numbers::pi;
  const double r = radius * std::cos(0.5 * pi * s);
  return {r * std::cos(pi * s), r * std::sin(pi * s), s};
}

RefractiveField::RefractiveField(RefractiveParams params) : params_(params) {
  if (params_.axis_samples < 2) throw ConfigError("axis sampling needs at least two samples");
  if (!(params_.tau > 0.0)) throw ConfigError("smoothing width tau must be positive");
  if (!(params_.epsilon > 0.0)) throw ConfigError("tube radius epsilon must be positive");
  if (!(params_.n0 > 0.0) || !(params_.n1 > 0.0)) throw ConfigError("refractive indices must be positive");
  const std::size_t n = params_.axis_samples;
  sample_s_.resize(n);
  sample_points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    sample_s_[i] = s;
    sample_points_[i] = helix_axis(s, params_.radius);
  }
}

double RefractiveField::distance_sq(const Point3& x, double s) const {
  const Point3 h = helix_axis(s, params_.radius);
  const double dx = x[0] - h[0], dy = x[1] - h[1], dz = x[2] - h[2];
  return dx * dx + dy * dy + dz * dz;
}

AxisDistance RefractiveField::distance_to_axis(const Point3& x) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_points_.size(); ++i) {
    const Point3& h = sample_points_[i];
    const double dx = x[0] - h[0], dy = x[1] - h[1], dz = x[2] - h[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  double lo = sample_s_[best == 0 ? 0 : best - 1];
  double hi = sample_s_[std::min(best + 1, sample_s_.size() - 1)];
  while (hi - lo > params_.refine_tolerance) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (distance_sq(x, m1) < distance_sq(x, m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  double s = 0.5 * (lo + hi);
  double d2 = distance_sq(x, s);
  // The refined point can only improve on the best raw sample.
  if (best_d2 < d2) {
    s = sample_s_[best];
    d2 = best_d2;
  }
  return {std::sqrt(d2), s};
}

double RefractiveField::index_sharp(const Point3& x) const {
  return distance_to_axis(x).distance <= params_.epsilon ? params_.n0 : params_.n1;
}

double RefractiveField::refractive_index(const Point3& x, IndexMode mode) const {
  return index<double>(std::span<const double>(x.data(), 3), mode);
}

}  // namespace ritz::metrics
