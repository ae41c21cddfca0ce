#include "ritz/core/quadrature.hpp"

#include "ritz/error.hpp"

namespace ritz::core {

QuadGrid::QuadGrid(std::size_t n_points, QuadRule rule) : rule_(rule) {
  if (n_points < 2) throw ConfigError("quadrature grid needs at least 2 points");
  if (rule == QuadRule::kSimpson && n_points < 3) throw ConfigError("Simpson quadrature needs at least 3 points");
  nodes_.resize(n_points);
  coefficients_.assign(n_points, 0.0);
  const std::size_t intervals = n_points - 1;
  const double last = static_cast<double>(intervals);
  divisor_ = last;
  for (std::size_t i = 0; i < n_points; ++i) nodes_[i] = static_cast<double>(i) / last;

  auto finish = [&] {
    weights_.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) weights_[i] = coefficients_[i] / divisor_;
  };
  if (rule == QuadRule::kTrapezoid) {
    for (std::size_t i = 0; i < n_points; ++i) coefficients_[i] = 1.0;
    coefficients_.front() = 0.5;
    coefficients_.back() = 0.5;
    finish();
    return;
  }
  // Simpson panels over pairs of intervals, and a 3/8 panel over the last
  // three when the interval count is odd.
  const std::size_t tail = (intervals % 2 == 1) ? 3 : 0;
  if (intervals == 1) throw ConfigError("Simpson quadrature needs at least 2 intervals");
  const std::size_t simpson_end = intervals - tail;
  for (std::size_t i = 0; i < simpson_end; i += 2) {
    coefficients_[i] += 1.0 / 3.0;
    coefficients_[i + 1] += 4.0 / 3.0;
    coefficients_[i + 2] += 1.0 / 3.0;
  }
  if (tail) {
    const std::size_t i = simpson_end;
    coefficients_[i] += 3.0 / 8.0;
    coefficients_[i + 1] += 9.0 / 8.0;
    coefficients_[i + 2] += 9.0 / 8.0;
    coefficients_[i + 3] += 3.0 / 8.0;
  }
  finish();
}

}  // namespace ritz::core
