#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ritz/metrics/metric_field.hpp"

namespace ritz::metrics {

// A surface map N: R^k -> R^n. Surface types provide
//   std::size_t intrinsic_dim() const, ambient_dim() const, std::string name() const
//   template <class T> std::vector<T> map(std::span<const T> theta) const

struct PlaneSurface {
  std::size_t intrinsic_dim() const { return 2; }
  std::size_t ambient_dim() const { return 3; }
  std::string name() const { return "plane"; }

  template <class T>
  std::vector<T> map(std::span<const T> th) const {
    return {th[0], th[1], T(0.0)};
  }
};

// Unit sphere in polar/azimuth coordinates (θ1 from the pole, θ2 around it).
struct SphereSurface {
  std::size_t intrinsic_dim() const { return 2; }
  std::size_t ambient_dim() const { return 3; }
  std::string name() const { return "sphere"; }

  template <class T>
  std::vector<T> map(std::span<const T> th) const {
    using std::cos;
    using std::sin;
    const T s1 = sin(th[0]);
    return {s1 * cos(th[1]), s1 * sin(th[1]), cos(th[0])};
  }
};

// Terrain over the topographic coordinates (θ1, θ2) ∈ [-1, 1]² with elevation
// h·(sin(fπθ1)·sin(fπθ1θ2))².
struct LandscapeSurface {
  double height = 0.25;
  double frequency = 2.0;

  std::size_t intrinsic_dim() const { return 2; }
  std::size_t ambient_dim() const { return 3; }
  std::string name() const { return "landscape"; }

  template <class T>
  T elevation(const T& x, const T& y) const {
    using std::sin;
    const double fp = frequency * std::numbers::pi;
    const T s = sin(fp * x) * sin(fp * (x * y));
    return height * (s * s);
  }

  template <class T>
  std::vector<T> map(std::span<const T> th) const {
    return {th[0], th[1], elevation(th[0], th[1])};
  }
};

// Surface composed with a rigid motion x -> Q·x + c of the ambient space.
template <class Surface>
struct RigidlyMovedSurface {
  Surface base;
  std::array<std::array<double, 3>, 3> rotation{};
  std::array<double, 3> shift{};

  std::size_t intrinsic_dim() const { return base.intrinsic_dim(); }
  std::size_t ambient_dim() const { return 3; }
  std::string name() const { return base.name() + "_moved"; }

  template <class T>
  std::vector<T> map(std::span<const T> th) const {
    const std::vector<T> p = base.map(th);
    std::vector<T> out;
    for (std::size_t i = 0; i < 3; ++i) {
      out.push_back(ad::sum_of_products<T>(
                        3, [&](std::size_t j) { return T(rotation[i][j]); }, [&](std::size_t j) { return p[j]; }) +
                    T(shift[i]));
    }
    return out;
  }
};

// Jacobian columns ∂N/∂θ_j by forward mode, one direction per column.
template <class T, class Surface>
std::vector<std::vector<T>> surface_jacobian(const Surface& surface, std::span<const T> theta) {
  using D = ad::Dual<T>;
  const std::size_t k = surface.intrinsic_dim();
  std::vector<std::vector<T>> cols(k);
  std::vector<D> seeded(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < k; ++i) seeded[i] = D(theta[i], T(i == j ? 1.0 : 0.0));
    const std::vector<D> n = surface.map(std::span<const D>(seeded));
    cols[j].reserve(n.size());
    for (const D& c : n) {
      if (!std::isfinite(ad::value_of(c.deriv))) throw DomainError("non-finite surface Jacobian");
      cols[j].push_back(c.deriv);
    }
  }
  return cols;
}

// g_jk = ∂N/∂θ_j · ∂N/∂θ_k
template <class T, class Surface>
SquareMatrix<T> metric_from_surface(const Surface& surface, std::span<const T> theta) {
  const auto cols = surface_jacobian<T>(surface, theta);
  const std::size_t k = cols.size();
  SquareMatrix<T> g(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j; l < k; ++l) {
      g(j, l) = ad::sum_of_products<T>(
          cols[j].size(), [&](std::size_t a) { return cols[j][a]; }, [&](std::size_t a) { return cols[l][a]; });
      if (l != j) g(l, j) = g(j, l);
    }
  }
  return g;
}

template <class Surface>
class SurfaceMetric : public MetricFieldBase<SurfaceMetric<Surface>> {
 public:
  explicit SurfaceMetric(Surface surface) : surface_(std::move(surface)) {}

  std::size_t dimension() const override { return surface_.intrinsic_dim(); }
  std::string name() const override { return surface_.name(); }
  const Surface& surface() const { return surface_; }

  template <class T>
  SquareMatrix<T> metric_at(std::span<const T> theta) const {
    return metric_from_surface<T>(surface_, theta);
  }

 private:
  Surface surface_;
};

using PlaneMetric = SurfaceMetric<PlaneSurface>;
using SphereMetric = SurfaceMetric<SphereSurface>;
using LandscapeMetric = SurfaceMetric<LandscapeSurface>;

inline std::array<double, 3> landscape_surface(std::span<const double> theta, double h, double f) {
  const auto p = LandscapeSurface{h, f}.map(theta);
  return {p[0], p[1], p[2]};
}

}  // namespace ritz::metrics
