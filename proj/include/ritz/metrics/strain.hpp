#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ritz/ad/autodiff.hpp"
#include "ritz/ad/dual.hpp"
#include "ritz/core/mask.hpp"
#include "ritz/core/quadrature.hpp"
#include "ritz/metrics/metric_field.hpp"
#include "ritz/nn/network.hpp"

namespace ritz::metrics {

// Displacement models supply the amplitude M(x; θ) of the ansatz
// û(x; θ) = sin(πx)·M(x; θ), which pins both ends of the bar.

// M is a scalar network of x.
struct NetworkAmplitude {
  nn::Architecture arch;

  std::size_t param_count() const { return arch.param_count(); }

  template <class X, class P>
  X eval(const X& x, std::span<const P> theta) const {
    return nn::forward<X, P>(arch, theta, x)[0];
  }
};

// M(x) = Σ_k θ_k x^k. Linear in θ, so its strain metric is constant.
struct PolynomialAmplitude {
  std::size_t terms = 1;

  std::size_t param_count() const { return terms; }

  template <class X, class P>
  X eval(const X& x, std::span<const P> theta) const {
    X acc = ad::lift<X>(theta[terms - 1]);
    for (std::size_t k = terms - 1; k-- > 0;) acc = acc * x + ad::lift<X>(theta[k]);
    return acc;
  }
};

template <class X, class P, class Model>
X displacement(const Model& model, const X& x, std::span<const P> theta) {
  return core::endpoint_mask(x) * model.eval(x, theta);
}

// ∂²û/∂x∂θ_k for every k at one x: forward mode in x on a reverse graph in θ.
template <class Model>
std::vector<double> strain_mixed_derivative(const Model& model, std::span<const double> theta, double x) {
  ad::Tape tape;
  const std::vector<ad::Var> leaves = tape.leaves(theta);
  const ad::Dual<ad::Var> xin(ad::Var(x), ad::Var(1.0));
  const auto u = displacement(model, xin, std::span<const ad::Var>(leaves));
  return ad::gradient(tape, u.deriv, leaves);
}

// U(θ) = ∫ ½(∂û/∂x)² dx
template <class Model>
double strain_energy(const Model& model, std::span<const double> theta, const core::QuadGrid& xgrid) {
  return xgrid.integrate([&](double x) {
    const auto u = displacement(model, ad::Dual<double>(x, 1.0), theta);
    return 0.5 * u.deriv * u.deriv;
  });
}

// dU/dt = ∫ ∂û/∂x · ∂²û/∂x∂t dx along a parameter velocity θ̇.
template <class Model>
double strain_power(const Model& model, std::span<const double> theta, std::span<const double> velocity,
                    const core::QuadGrid& xgrid) {
  using Dt = ad::Dual<double>;
  using Dx = ad::Dual<Dt>;
  std::vector<Dt> p(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) p[k] = Dt(theta[k], velocity[k]);
  return xgrid.integrate([&](double x) {
    const Dx u = displacement(model, Dx(Dt(x), Dt(1.0)), std::span<const Dt>(p));
    return u.deriv.value * u.deriv.deriv;
  });
}

// v·g(θ)·v = ∫ (∂²û/∂x∂t)² dx for the ansatz û of a fully connected network,
// with its gradient in θ and v, computed by a hand-written batched forward and
// reverse sweep. Matches the generic quadratic form up to rounding.
struct StrainQuadratic {
  double value = 0.0;
  std::vector<double> d_theta;
  std::vector<double> d_velocity;
};

StrainQuadratic strain_quadratic_kernel(const nn::Architecture& arch, const core::QuadGrid& xgrid,
                                        std::span<const double> theta, std::span<const double> velocity,
                                        bool with_gradient);

// Records the kernel as one graph node whose operands are θ and v.
ad::Var strain_quadratic_fused(const nn::Architecture& arch, const core::QuadGrid& xgrid,
                               std::span<const ad::Var> theta, std::span<const ad::Var> velocity);

enum class StrainKernel { kGeneric, kFused };

// g_kj(θ) = ∫ ∂²û/∂x∂θ_k · ∂²û/∂x∂θ_j dx over the displacement parameters.
template <class Model>
class StrainMetric : public MetricFieldBase<StrainMetric<Model>> {
  using Base = MetricFieldBase<StrainMetric<Model>>;
  static constexpr bool kHasKernel = std::is_same_v<Model, NetworkAmplitude>;

 public:
  explicit StrainMetric(Model model, std::size_t x_points = 100,
                        StrainKernel kernel = kHasKernel ? StrainKernel::kFused : StrainKernel::kGeneric)
      : model_(std::move(model)), xgrid_(x_points), kernel_(kernel) {
    if (kernel_ == StrainKernel::kFused && !kHasKernel) throw ConfigError("fused strain kernel needs a network model");
    if constexpr (kHasKernel) {
      if (model_.arch.embedding() || model_.arch.input_dim() != 1 || model_.arch.output_dim() != 1) {
        throw ConfigError("displacement network must map x to a scalar");
      }
    }
  }

  std::size_t dimension() const override { return model_.param_count(); }
  std::string name() const override { return "strain"; }
  const Model& model() const { return model_; }
  const core::QuadGrid& xgrid() const { return xgrid_; }
  StrainKernel kernel() const { return kernel_; }
  void set_kernel(StrainKernel k) {
    if (k == StrainKernel::kFused && !kHasKernel) throw ConfigError("fused strain kernel needs a network model");
    kernel_ = k;
  }

  using Base::quadratic_form;

  double quadratic_form(std::span<const double> theta, std::span<const double> v) const override {
    if constexpr (kHasKernel) {
      if (kernel_ == StrainKernel::kFused) {
        this->check_dimension(theta.size());
        this->check_dimension(v.size());
        return strain_quadratic_kernel(model_.arch, xgrid_, theta, v, false).value;
      }
    }
    return Base::quadratic_form(theta, v);
  }

  ad::Var quadratic_form(std::span<const ad::Var> theta, std::span<const ad::Var> v) const override {
    if constexpr (kHasKernel) {
      if (kernel_ == StrainKernel::kFused) {
        this->check_dimension(theta.size());
        this->check_dimension(v.size());
        return strain_quadratic_fused(model_.arch, xgrid_, theta, v);
      }
    }
    return Base::quadratic_form(theta, v);
  }

  template <class T>
  SquareMatrix<T> metric_at(std::span<const T> theta) const {
    const std::size_t k = theta.size();
    std::vector<std::vector<T>> cols(xgrid_.size());
    for (std::size_t i = 0; i < xgrid_.size(); ++i) cols[i] = mixed_row<T>(theta, xgrid_.node(i));
    SquareMatrix<T> g(k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        g(a, b) = ad::sum_of_products<T>(
            xgrid_.size(), [&](std::size_t i) { return T(xgrid_.weight(i)) * cols[i][a]; },
            [&](std::size_t i) { return cols[i][b]; });
        if (b != a) g(b, a) = g(a, b);
      }
    }
    return g;
  }

  // ∫ (∂x D_v û)² dx: parameters carry the velocity as a dual part, x is a
  // second dual layer, and the mixed component is squared and summed. On a
  // reverse graph the result depends on θ and v through every layer.
  template <class T>
  T quadratic_at(std::span<const T> theta, std::span<const T> v) const {
    using Dt = ad::Dual<T>;
    using Dx = ad::Dual<Dt>;
    std::vector<Dt> p(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) p[k] = Dt(theta[k], v[k]);
    std::vector<T> rate2(xgrid_.size());
    for (std::size_t i = 0; i < xgrid_.size(); ++i) {
      const Dx u = displacement(model_, Dx(Dt(xgrid_.node(i)), Dt(1.0)), std::span<const Dt>(p));
      rate2[i] = u.deriv.deriv * u.deriv.deriv;
    }
    return ad::sum_of_products<T>(
        xgrid_.size(), [&](std::size_t i) { return T(xgrid_.weight(i)); }, [&](std::size_t i) { return rate2[i]; });
  }

 private:
  // Row ∂²û/∂x∂θ_k (k = 0..K-1) at x in scalar type T.
  template <class T>
  std::vector<T> mixed_row(std::span<const T> theta, double x) const {
    if constexpr (std::is_same_v<T, double>) {
      return strain_mixed_derivative(model_, theta, x);
    } else {
      // One forward direction per parameter keeps the result differentiable in T.
      using Dk = ad::Dual<T>;
      using Dx = ad::Dual<Dk>;
      const std::size_t k = theta.size();
      std::vector<Dk> p(k);
      std::vector<T> row(k);
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) p[i] = Dk(theta[i], T(i == j ? 1.0 : 0.0));
        const Dx u = displacement(model_, Dx(Dk(x), Dk(1.0)), std::span<const Dk>(p));
        row[j] = u.deriv.deriv;
      }
      return row;
    }
  }

  Model model_;
  core::QuadGrid xgrid_;
  StrainKernel kernel_;
};

using NetworkStrainMetric = StrainMetric<NetworkAmplitude>;
using PolynomialStrainMetric = StrainMetric<PolynomialAmplitude>;

}  // namespace ritz::metrics
