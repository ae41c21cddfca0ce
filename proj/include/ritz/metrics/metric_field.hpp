#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ritz/ad/dual.hpp"
#include "ritz/error.hpp"

namespace ritz::metrics {

// Dense row-major square matrix over a scalar type.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, T(0.0)) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const T> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

template <class T>
SquareMatrix<double> values_of(const SquareMatrix<T>& m) {
  SquareMatrix<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = ad::value_of(m(i, j));
  return out;
}

// v·g·v through one reduction.
template <class T>
T contract(const SquareMatrix<T>& g, std::span<const T> v) {
  const std::size_t k = g.size();
  return ad::sum_of_products<T>(
      k * k, [&](std::size_t n) { return g(n / k, n % k); },
      [&](std::size_t n) { return v[n / k] * v[n % k]; });
}

// A metric tensor field θ ↦ g(θ) on a k-dimensional parameter space. The
// field is evaluated in plain doubles, in forward mode (metric derivatives),
// and on a reverse graph (training).
class MetricField {
 public:
  virtual ~MetricField() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
  // True when g does not depend on θ.
  virtual bool is_constant() const { return false; }

  virtual SquareMatrix<double> evaluate(std::span<const double> theta) const = 0;
  virtual SquareMatrix<ad::Dual<double>> evaluate(std::span<const ad::Dual<double>> theta) const = 0;
  virtual SquareMatrix<ad::Var> evaluate(std::span<const ad::Var> theta) const = 0;

  // v·g(θ)·v, the integrand of the energy functional.
  virtual double quadratic_form(std::span<const double> theta, std::span<const double> v) const = 0;
  virtual ad::Var quadratic_form(std::span<const ad::Var> theta, std::span<const ad::Var> v) const = 0;

 protected:
  void check_dimension(std::size_t n) const {
    if (n != dimension()) {
      throw ConfigError("metric '" + name() + "' has dimension " + std::to_string(dimension()) +
                        " but was given a point of dimension " + std::to_string(n));
    }
  }
};

// Implements the virtual interface from two templates on Derived:
//   template <class T> SquareMatrix<T> metric_at(std::span<const T>) const;
//   template <class T> T quadratic_at(std::span<const T>, std::span<const T>) const;  (optional)
template <class Derived>
class MetricFieldBase : public MetricField {
 public:
  SquareMatrix<double> evaluate(std::span<const double> theta) const override { return eval_impl(theta); }
  SquareMatrix<ad::Dual<double>> evaluate(std::span<const ad::Dual<double>> theta) const override {
    return eval_impl(theta);
  }
  SquareMatrix<ad::Var> evaluate(std::span<const ad::Var> theta) const override { return eval_impl(theta); }

  double quadratic_form(std::span<const double> theta, std::span<const double> v) const override {
    return quad_impl(theta, v);
  }
  ad::Var quadratic_form(std::span<const ad::Var> theta, std::span<const ad::Var> v) const override {
    return quad_impl(theta, v);
  }

  template <class T>
  T quadratic_at(std::span<const T> theta, std::span<const T> v) const {
    return contract(self().metric_at(theta), v);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }

  template <class T>
  SquareMatrix<T> eval_impl(std::span<const T> theta) const {
    check_dimension(theta.size());
    return self().metric_at(theta);
  }

  template <class T>
  T quad_impl(std::span<const T> theta, std::span<const T> v) const {
    check_dimension(theta.size());
    check_dimension(v.size());
    return self().quadratic_at(theta, v);
  }
};

// g(θ) = g0 for all θ.
class ConstantMetric : public MetricFieldBase<ConstantMetric> {
 public:
  explicit ConstantMetric(SquareMatrix<double> g0, std::string name = "constant");
  static ConstantMetric identity(std::size_t k);
  static ConstantMetric scaled_identity(std::size_t k, double scale);
  static ConstantMetric diagonal(std::vector<double> diag);

  std::size_t dimension() const override { return g0_.size(); }
  std::string name() const override { return name_; }
  bool is_constant() const override { return true; }

  template <class T>
  SquareMatrix<T> metric_at(std::span<const T>) const {
    SquareMatrix<T> g(g0_.size());
    for (std::size_t i = 0; i < g0_.size(); ++i)
      for (std::size_t j = 0; j < g0_.size(); ++j) g(i, j) = T(g0_(i, j));
    return g;
  }

  template <class T>
  T quadratic_at(std::span<const T>, std::span<const T> v) const {
    const std::size_t k = g0_.size();
    return ad::sum_of_products<T>(
        k * k, [&](std::size_t n) { return T(g0_(n / k, n % k)); },
        [&](std::size_t n) { return v[n / k] * v[n % k]; });
  }

 private:
  SquareMatrix<double> g0_;
  std::string name_;
};

}  // namespace ritz::metrics
