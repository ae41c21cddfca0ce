#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ritz/ad/dual.hpp"
#include "ritz/metrics/metric_field.hpp"

namespace ritz::metrics {

using Point3 = std::array<double, 3>;

// Axis of the helical wave guide, parameterised by height s ∈ [-1, 1]. The
// radius factor cos(πs/2) pinches the helix onto the z axis at both ends.
Point3 helix_axis(double s, double radius);

struct AxisDistance {
  double distance = 0.0;
  double parameter = 0.0;  // minimising height s*
};

enum class IndexMode { kSharp, kSmooth };

struct RefractiveParams {
  double n0 = 1.0;        // index inside the tube
  double n1 = 20.0;       // background index
  double epsilon = 0.2;   // tube radius
  double radius = 0.75;   // helix radius
  double tau = 0.05;      // interface smoothing width
  std::size_t axis_samples = 400;
  double refine_tolerance = 1e-8;
};

// Refractive index of a helical tube embedded in a uniform background.
class RefractiveField {
 public:
  explicit RefractiveField(RefractiveParams params = {});

  const RefractiveParams& params() const { return params_; }

  // Global minimum over s ∈ [-1, 1] of |x - h(s)|: dense scan of the cached
  // axis samples, then ternary refinement inside the best bracket.
  AxisDistance distance_to_axis(const Point3& x) const;

  // Distance as a differentiable function of x. The minimiser s* is held
  // fixed, which gives the exact first derivative since ∂|x-h(s)|/∂s = 0 at
  // an interior minimiser.
  template <class T>
  T distance(std::span<const T> x) const {
    using std::sqrt;
    const Point3 xv{ad::value_of(x[0]), ad::value_of(x[1]), ad::value_of(x[2])};
    const AxisDistance ad_ = distance_to_axis(xv);
    const Point3 h = helix_axis(ad_.parameter, params_.radius);
    const T dx = x[0] - T(h[0]);
    const T dy = x[1] - T(h[1]);
    const T dz = x[2] - T(h[2]);
    const T d2 = dx * dx + dy * dy + dz * dz;
    if (ad::value_of(d2) == 0.0) return T(0.0);
    return sqrt(d2);
  }

  double index_sharp(const Point3& x) const;

  // n1 + (n0 - n1)·sigmoid((ε - d)/τ), with sigmoid(z) = (1 + tanh(z/2))/2.
  template <class T>
  T index_smooth(std::span<const T> x) const {
    using std::tanh;
    const T d = distance(x);
    const T s = 0.5 * (1.0 + tanh((0.5 / params_.tau) * (params_.epsilon - d)));
    return params_.n1 + (params_.n0 - params_.n1) * s;
  }

  double refractive_index(const Point3& x, IndexMode mode) const;

  template <class T>
  T index(std::span<const T> x, IndexMode mode) const {
    if (mode == IndexMode::kSmooth) return index_smooth(x);
    return T(index_sharp({ad::value_of(x[0]), ad::value_of(x[1]), ad::value_of(x[2])}));
  }

 private:
  double distance_sq(const Point3& x, double s) const;

  RefractiveParams params_;
  std::vector<double> sample_s_;
  std::vector<Point3> sample_points_;
};

// Fermat metric g = n(θ)²·I in R³.
class RefractiveMetric : public MetricFieldBase<RefractiveMetric> {
 public:
  explicit RefractiveMetric(RefractiveField field, IndexMode mode = IndexMode::kSmooth)
      : field_(std::move(field)), mode_(mode) {}

  std::size_t dimension() const override { return 3; }
  std::string name() const override { return mode_ == IndexMode::kSmooth ? "waveguide" : "waveguide_sharp"; }
  const RefractiveField& field() const { return field_; }
  IndexMode mode() const { return mode_; }

  template <class T>
  SquareMatrix<T> metric_at(std::span<const T> theta) const {
    const T n = field_.index(theta, mode_);
    const T n2 = n * n;
    SquareMatrix<T> g(3);
    for (std::size_t i = 0; i < 3; ++i) g(i, i) = n2;
    return g;
  }

  template <class T>
  T quadratic_at(std::span<const T> theta, std::span<const T> v) const {
    const T n = field_.index(theta, mode_);
    const T vv = ad::sum_of_products<T>(
        3, [&](std::size_t i) { return v[i]; }, [&](std::size_t i) { return v[i]; });
    return (n * n) * vv;
  }

 private:
  RefractiveField field_;
  IndexMode mode_;
};

}  // namespace ritz::metrics
