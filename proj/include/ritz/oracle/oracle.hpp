#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ritz/core/path.hpp"
#include "ritz/core/quadrature.hpp"
#include "ritz/metrics/metric_field.hpp"

namespace ritz::oracle {

// dg[l](i, j) = ∂g_ij/∂θ_l
using MetricDerivatives = std::vector<metrics::SquareMatrix<double>>;

MetricDerivatives metric_derivatives(const metrics::MetricField& metric, std::span<const double> theta);

// Christoffel symbols in the convention
//   Γ_ijk = g⁻¹_iℓ (∂g_jℓ/∂θ_k − ½ ∂g_jk/∂θ_ℓ),
// which is not symmetric in (j, k) but gives the geodesic equation
// θ̈_i + Γ_ijk θ̇_j θ̇_k = 0.
class ChristoffelTensor {
 public:
  explicit ChristoffelTensor(std::size_t k) : k_(k), data_(k * k * k, 0.0) {}

  std::size_t dimension() const { return k_; }
  double& operator()(std::size_t i, std::size_t j, std::size_t l) { return data_[(i * k_ + j) * k_ + l]; }
  double operator()(std::size_t i, std::size_t j, std::size_t l) const { return data_[(i * k_ + j) * k_ + l]; }

  // c_i = Γ_ijk v_j v_k
  std::vector<double> contract(std::span<const double> v) const;

 private:
  std::size_t k_;
  std::vector<double> data_;
};

// Throws DegenerateMetricError when g(θ) has condition number above 1e12 or
// is not positive definite.
ChristoffelTensor christoffel(const metrics::MetricField& metric, std::span<const double> theta);

// Γ^i_jk v_j v_k with the symmetric symbols ½ g^iℓ(∂_j g_ℓk + ∂_k g_ℓj − ∂_ℓ g_jk).
std::vector<double> standard_contraction(const metrics::MetricField& metric, std::span<const double> theta,
                                         std::span<const double> v);

// θ̈ = −Γ(θ)·θ̇·θ̇
std::vector<double> geodesic_acceleration(const metrics::MetricField& metric, std::span<const double> theta,
                                          std::span<const double> velocity);

struct ResidualReport {
  std::vector<double> t;
  std::vector<std::vector<double>> residual;  // r_i = θ̈_i + Γ_ijk θ̇_j θ̇_k
  double rms = 0.0;                           // sqrt(mean |r|²)
  double max = 0.0;                           // max |r|
};

// Residual of the geodesic equation at the interior grid nodes, with exact
// path derivatives from nested forward mode.
ResidualReport el_residual(const core::PathModel& model, const metrics::MetricField& metric,
                           const core::QuadGrid& grid);

// Residual of a sampled path (rows of positions at strictly increasing t)
// with three-point finite-difference derivatives.
ResidualReport el_residual_sampled(std::span<const double> t, const std::vector<std::vector<double>>& theta,
                                   const metrics::MetricField& metric);

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> theta_dot;

  const std::vector<double>& end() const { return theta.back(); }
  // ½∫ θ̇·g(θ)θ̇ dt by the trapezoid rule over the samples.
  double energy(const metrics::MetricField& metric) const;
};

// Fixed-step classical RK4 for the geodesic equation on [0, duration].
Trajectory rk4_integrate(const metrics::MetricField& metric, std::span<const double> theta0,
                         std::span<const double> v0, std::size_t steps, double duration = 1.0);

struct ShootingConfig {
  std::size_t steps = 1000;
  double tolerance = 1e-8;
  std::size_t max_iterations = 50;
  double fd_step = 1e-6;
  std::size_t max_halvings = 10;
};

struct ShootingResult {
  std::vector<double> v0;
  Trajectory trajectory;
  double miss = 0.0;  // ‖θ(1) − θ_T‖
  std::size_t iterations = 0;
  bool converged = false;
  double energy = 0.0;
};

// Raised by shoot() when the tolerance is not met; carries the best iterate.
class ShootingError : public ConvergenceError {
 public:
  ShootingError(const std::string& what, ShootingResult best) : ConvergenceError(what), best_(std::move(best)) {}
  const ShootingResult& best() const { return best_; }

 private:
  ShootingResult best_;
};

// Damped Newton on v0 ↦ θ(1; v0) − θ_T with a central finite-difference Jacobian.
ShootingResult shoot(const metrics::MetricField& metric, std::span<const double> theta0,
                     std::span<const double> theta_target, std::span<const double> v_guess,
                     const ShootingConfig& config = {});

// max_i ‖θ_i − θ_ref(t_i)‖∞ with the reference linearly interpolated in t.
double sup_gap(const Trajectory& reference, std::span<const double> t, const std::vector<std::vector<double>>& theta);

struct GradientCheck {
  std::vector<double> analytic;   // ∇E·d from energy_and_gradient
  std::vector<double> numeric;    // (E(β + hd) − E(β − hd)) / 2h
  std::vector<double> rel_error;  // |analytic − numeric| / max(|numeric|, 1e-12)
  double max_rel_error = 0.0;
};

// Directional derivatives of the discrete energy along seeded random unit
// directions in network-parameter space, against central differences.
GradientCheck gradient_check(const core::PathModel& model, const metrics::MetricField& metric,
                             const core::QuadGrid& grid, std::size_t directions, std::uint64_t seed,
                             double step = 1e-5);

}  // namespace ritz::oracle
