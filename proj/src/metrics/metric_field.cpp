#include "ritz/metrics/metric_field.hpp"

#include <cmath>

namespace ritz::metrics {

ConstantMetric::ConstantMetric(SquareMatrix<double> g0, std::string name) : g0_(std::move(g0)), name_(std::move(name)) {
  if (g0_.size() == 0) throw ConfigError("constant metric needs a positive dimension");
  for (std::size_t i = 0; i < g0_.size(); ++i) {
    for (std::size_t j = 0; j < g0_.size(); ++j) {
      if (!std::isfinite(g0_(i, j))) throw ConfigError("constant metric has a non-finite entry");
      if (g0_(i, j) != g0_(j, i)) throw ConfigError("constant metric must be symmetric");
    }
  }
}

ConstantMetric ConstantMetric::identity(std::size_t k) { return scaled_identity(k, 1.0); }

ConstantMetric ConstantMetric::scaled_identity(std::size_t k, double scale) {
  SquareMatrix<double> g(k);
  for (std::size_t i = 0; i < k; ++i) g(i, i) = scale;
  return ConstantMetric(std::move(g), scale == 1.0 ? "flat" : "scaled_identity");
}

ConstantMetric ConstantMetric::diagonal(std::vector<double> diag) {
  SquareMatrix<double> g(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) g(i, i) = diag[i];
  return ConstantMetric(std::move(g), "diagonal");
}

}  // namespace ritz::metrics
