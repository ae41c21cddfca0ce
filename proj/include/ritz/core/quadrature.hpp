#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ritz::core {

enum class QuadRule { kTrapezoid, kSimpson };

// Uniform nodes on [0, 1] (both endpoints included) with trapezoid or
// composite Simpson weights. An odd number of intervals closes the Simpson
// rule with one three-eighths panel. Weights are stored as coefficients over
// the common divisor n - 1, and sums divide once at the end, so the trapezoid
// rule integrates constants exactly in floating point.
class QuadGrid {
 public:
  explicit QuadGrid(std::size_t n_points = 250, QuadRule rule = QuadRule::kTrapezoid);

  QuadRule rule() const { return rule_; }

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double coefficient(std::size_t i) const { return coefficients_[i]; }
  double divisor() const { return divisor_; }

  // Σ c_i f(t_i) / (n - 1), accumulated in node order.
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += coefficients_[i] * f(nodes_[i]);
    return s / divisor_;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> coefficients_;
  double divisor_ = 1.0;
  QuadRule rule_;
};

}  // namespace ritz::core
