#include "ritz/oracle/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ritz/core/solver.hpp"

namespace ritz::oracle {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix to_eigen(const metrics::SquareMatrix<double>& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

std::string point_string(std::span<const double> theta) {
  std::ostringstream s;
  s.precision(10);
  s << "[";
  for (std::size_t i = 0; i < theta.size(); ++i) s << (i ? ", " : "") << theta[i];
  s << "]";
  return s.str();
}

// g(θ)⁻¹ after a conditioning check.
Matrix checked_inverse(const metrics::MetricField& metric, std::span<const double> theta) {
  const Matrix g = to_eigen(metric.evaluate(theta));
  if (!g.allFinite()) throw DomainError("non-finite metric at θ = " + point_string(theta));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    std::ostringstream msg;
    msg << "metric '" << metric.name() << "' is degenerate at θ = " << point_string(theta)
        << " (eigenvalues in [" << lo << ", " << hi << "])";
    throw DegenerateMetricError(msg.str());
  }
  return g.ldlt().solve(Matrix::Identity(g.rows(), g.cols()));
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ResidualReport summarize(ResidualReport r) {
  double sum = 0.0;
  for (const auto& v : r.residual) {
    const double n = norm(v);
    sum += n * n;
    r.max = std::max(r.max, n);
  }
  r.rms = r.residual.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(r.residual.size()));
  return r;
}

std::vector<double> residual_at(const metrics::MetricField& metric, double t, std::span<const double> theta,
                                std::span<const double> velocity, std::span<const double> acceleration) {
  std::vector<double> c;
  try {
    c = christoffel(metric, theta).contract(velocity);
  } catch (const DegenerateMetricError& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "at t = " << t << ": " << e.what();
    throw DegenerateMetricError(msg.str());
  }
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += acceleration[i];
  return c;
}

}  // namespace

MetricDerivatives metric_derivatives(const metrics::MetricField& metric, std::span<const double> theta) {
  const std::size_t k = metric.dimension();
  if (theta.size() != k) throw ConfigError("point dimension does not match the metric");
  MetricDerivatives dg(k, metrics::SquareMatrix<double>(k));
  std::vector<ad::Dual<double>> x(k);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t i = 0; i < k; ++i) x[i] = ad::Dual<double>(theta[i], i == l ? 1.0 : 0.0);
    const auto g = metric.evaluate(std::span<const ad::Dual<double>>(x));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double d = g(i, j).deriv;
        if (!std::isfinite(d)) throw DomainError("non-finite metric derivative at θ = " + point_string(theta));
        dg[l](i, j) = d;
      }
    }
  }
  return dg;
}

std::vector<double> ChristoffelTensor::contract(std::span<const double> v) const {
  std::vector<double> c(k_, 0.0);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < k_; ++j)
      for (std::size_t l = 0; l < k_; ++l) c[i] += (*this)(i, j, l) * v[j] * v[l];
  return c;
}

ChristoffelTensor christoffel(const metrics::MetricField& metric, std::span<const double> theta) {
  const std::size_t k = metric.dimension();
  const Matrix ginv = checked_inverse(metric, theta);
  const MetricDerivatives dg = metric_derivatives(metric, theta);
  ChristoffelTensor gamma(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < k; ++l) {
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
          s += ginv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) *
               (dg[l](j, m) - 0.5 * dg[m](j, l));
        }
        gamma(i, j, l) = s;
      }
    }
  }
  return gamma;
}

std::vector<double> standard_contraction(const metrics::MetricField& metric, std::span<const double> theta,
                                         std::span<const double> v) {
  const std::size_t k = metric.dimension();
  const Matrix ginv = checked_inverse(metric, theta);
  const MetricDerivatives dg = metric_derivatives(metric, theta);
  std::vector<double> c(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < k; ++l) {
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
          s += ginv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) *
               (dg[j](m, l) + dg[l](m, j) - dg[m](j, l));
        }
        c[i] += 0.5 * s * v[j] * v[l];
      }
    }
  }
  return c;
}

std::vector<double> geodesic_acceleration(const metrics::MetricField& metric, std::span<const double> theta,
                                          std::span<const double> velocity) {
  std::vector<double> a = christoffel(metric, theta).contract(velocity);
  for (double& x : a) x = -x;
  return a;
}

ResidualReport el_residual(const core::PathModel& model, const metrics::MetricField& metric,
                           const core::QuadGrid& grid) {
  if (metric.dimension() != model.dimension()) throw ConfigError("metric and path dimensions differ");
  ResidualReport r;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double t = grid.node(i);
    const core::PathJet jet = core::path_jet(model, t);
    r.t.push_back(t);
    r.residual.push_back(residual_at(metric, t, jet.position, jet.velocity, jet.acceleration));
  }
  return summarize(std::move(r));
}

ResidualReport el_residual_sampled(std::span<const double> t, const std::vector<std::vector<double>>& theta,
                                   const metrics::MetricField& metric) {
  const std::size_t n = t.size();
  if (theta.size() != n) throw ConfigError("sample times and positions differ in length");
  if (n < 3) throw ConfigError("a sampled path needs at least 3 points");
  const std::size_t k = metric.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    if (theta[i].size() != k) {
      throw ConfigError("row " + std::to_string(i) + " has dimension " + std::to_string(theta[i].size()) +
                        " but the metric has dimension " + std::to_string(k));
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw ConfigError("sample times must be strictly increasing");
  }
  ResidualReport r;
  std::vector<double> vel(k), acc(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    for (std::size_t j = 0; j < k; ++j) {
      const double a = theta[i - 1][j], b = theta[i][j], c = theta[i + 1][j];
      // Three-point Lagrange derivatives on a possibly non-uniform stencil.
      vel[j] = -h1 / (h0 * (h0 + h1)) * a + (h1 - h0) / (h0 * h1) * b + h0 / (h1 * (h0 + h1)) * c;
      acc[j] = 2.0 * (a / (h0 * (h0 + h1)) - b / (h0 * h1) + c / (h1 * (h0 + h1)));
    }
    r.t.push_back(t[i]);
    r.residual.push_back(residual_at(metric, t[i], theta[i], vel, acc));
  }
  return summarize(std::move(r));
}

double Trajectory::energy(const metrics::MetricField& metric) const {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double q0 = metric.quadratic_form(theta[i], theta_dot[i]);
    const double q1 = metric.quadratic_form(theta[i + 1], theta_dot[i + 1]);
    e += 0.25 * (t[i + 1] - t[i]) * (q0 + q1);
  }
  return e;
}

Trajectory rk4_integrate(const metrics::MetricField& metric, std::span<const double> theta0,
                         std::span<const double> v0, std::size_t steps, double duration) {
  const std::size_t k = metric.dimension();
  if (steps < 1) throw ConfigError("RK4 needs at least one step");
  if (theta0.size() != k || v0.size() != k) throw ConfigError("initial state does not match the metric dimension");
  const double h = duration / static_cast<double>(steps);
  Trajectory tr;
  tr.t.reserve(steps + 1);
  std::vector<double> x(theta0.begin(), theta0.end()), v(v0.begin(), v0.end());
  tr.t.push_back(0.0);
  tr.theta.push_back(x);
  tr.theta_dot.push_back(v);

  std::vector<double> xs(k), vs(k);
  auto stage = [&](const std::vector<double>& xb, const std::vector<double>& vb, const std::vector<double>* dx,
                   const std::vector<double>* dv, double scale, std::vector<double>& kx, std::vector<double>& kv) {
    for (std::size_t j = 0; j < k; ++j) {
      xs[j] = xb[j] + (dx ? scale * (*dx)[j] : 0.0);
      vs[j] = vb[j] + (dv ? scale * (*dv)[j] : 0.0);
    }
    kx = vs;
    kv = geodesic_acceleration(metric, xs, vs);
  };
  // Compensated accumulation of the state keeps the end point accurate
  // enough for finite-difference Jacobians of the shooting map.
  std::vector<double> cx(k, 0.0), cv(k, 0.0);
  auto accumulate = [](double& sum, double& carry, double increment) {
    const double y = increment - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  };
  std::vector<double> k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
  for (std::size_t s = 0; s < steps; ++s) {
    stage(x, v, nullptr, nullptr, 0.0, k1x, k1v);
    stage(x, v, &k1x, &k1v, 0.5 * h, k2x, k2v);
    stage(x, v, &k2x, &k2v, 0.5 * h, k3x, k3v);
    stage(x, v, &k3x, &k3v, h, k4x, k4v);
    bool finite = true;
    for (std::size_t j = 0; j < k; ++j) {
      accumulate(x[j], cx[j], h / 6.0 * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j]));
      accumulate(v[j], cv[j], h / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]));
      finite = finite && std::isfinite(x[j]) && std::isfinite(v[j]);
    }
    if (!finite) throw NumericalError("RK4 state blew up at step " + std::to_string(s + 1));
    tr.t.push_back(s + 1 == steps ? duration : static_cast<double>(s + 1) * h);
    tr.theta.push_back(x);
    tr.theta_dot.push_back(v);
  }
  return tr;
}

ShootingResult shoot(const metrics::MetricField& metric, std::span<const double> theta0,
                     std::span<const double> theta_target, std::span<const double> v_guess,
                     const ShootingConfig& config) {
  const std::size_t k = metric.dimension();
  if (theta0.size() != k || theta_target.size() != k || v_guess.size() != k) {
    throw ConfigError("shooting endpoints and guess must match the metric dimension");
  }
  for (double x : v_guess) {
    if (!std::isfinite(x)) throw ConfigError("initial velocity guess must be finite");
  }
  const auto kk = static_cast<Eigen::Index>(k);

  // Terminal miss θ(1; v) − θ_T; an integration blow-up counts as an infinite miss.
  auto miss_map = [&](const std::vector<double>& v, Trajectory* keep) {
    Eigen::VectorXd f(kk);
    try {
      Trajectory tr = rk4_integrate(metric, theta0, v, config.steps);
      for (std::size_t j = 0; j < k; ++j) f(static_cast<Eigen::Index>(j)) = tr.end()[j] - theta_target[j];
      if (keep) *keep = std::move(tr);
    } catch (const NumericalError&) {
      f.setConstant(std::numeric_limits<double>::infinity());
    }
    return f;
  };
  auto miss_norm = [](const Eigen::VectorXd& f) { return f.allFinite() ? f.norm() : std::numeric_limits<double>::infinity(); };

  ShootingResult res;
  res.v0.assign(v_guess.begin(), v_guess.end());
  Eigen::VectorXd f = miss_map(res.v0, &res.trajectory);
  res.miss = miss_norm(f);
  if (!std::isfinite(res.miss)) throw NumericalError("shooting: the initial guess blows up");

  Eigen::FullPivLU<Matrix> lu;
  while (res.miss >= config.tolerance && res.iterations < config.max_iterations) {
    ++res.iterations;
    Matrix J(kk, kk);
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> vp = res.v0, vm = res.v0;
      vp[j] += config.fd_step;
      vm[j] -= config.fd_step;
      J.col(static_cast<Eigen::Index>(j)) = (miss_map(vp, nullptr) - miss_map(vm, nullptr)) / (2.0 * config.fd_step);
    }
    if (!J.allFinite()) break;
    lu.compute(J);
    const Eigen::VectorXd delta = -lu.solve(f);
    if (!delta.allFinite()) break;

    double lambda = 1.0;
    std::vector<double> trial(k);
    Trajectory trial_traj;
    Eigen::VectorXd f_trial;
    double trial_miss = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h <= config.max_halvings; ++h) {
      for (std::size_t j = 0; j < k; ++j) trial[j] = res.v0[j] + lambda * delta(static_cast<Eigen::Index>(j));
      f_trial = miss_map(trial, &trial_traj);
      trial_miss = miss_norm(f_trial);
      if (trial_miss < res.miss) break;
      lambda *= 0.5;
    }
    if (!(trial_miss < res.miss)) break;  // no descent along the Newton direction
    res.v0 = trial;
    res.trajectory = std::move(trial_traj);
    f = f_trial;
    res.miss = trial_miss;
  }

  res.converged = res.miss < config.tolerance;
  // One chord step with the last Jacobian strips the remaining finite-difference error.
  if (res.converged && res.iterations > 0) {
    const Eigen::VectorXd delta = -lu.solve(f);
    std::vector<double> trial(k);
    for (std::size_t j = 0; j < k; ++j) trial[j] = res.v0[j] + delta(static_cast<Eigen::Index>(j));
    Trajectory trial_traj;
    const double trial_miss = miss_norm(miss_map(trial, &trial_traj));
    if (trial_miss < res.miss) {
      res.v0 = trial;
      res.trajectory = std::move(trial_traj);
      res.miss = trial_miss;
    }
  }
  res.energy = res.trajectory.energy(metric);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "shooting did not converge after " << res.iterations << " iterations (best miss " << res.miss << ")";
    throw ShootingError(msg.str(), std::move(res));
  }
  return res;
}

}  // namespace ritz::oracle

namespace ritz::oracle {

GradientCheck gradient_check(const core::PathModel& model, const metrics::MetricField& metric,
                             const core::QuadGrid& grid, std::size_t directions, std::uint64_t seed, double step) {
  if (directions == 0) throw ConfigError("gradient check needs at least one direction");
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  const core::EnergyGradient eg = core::energy_and_gradient(model, metric, grid);
  const std::size_t n = eg.gradient.size();
  std::seed_seq seq{seed, std::uint64_t{0x6772616463686b}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  GradientCheck out;
  core::PathModel probe = model;
  std::vector<double> d(n);
  for (std::size_t k = 0; k < directions; ++k) {
    double norm2 = 0.0;
    for (double& x : d) {
      x = normal(rng);
      norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    double analytic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] *= inv;
      analytic += eg.gradient[i] * d[i];
    }
    auto shifted = [&](double h) {
      auto p = probe.params().values();
      const auto base = model.params().values();
      for (std::size_t i = 0; i < n; ++i) p[i] = base[i] + h * d[i];
      return core::energy(probe, metric, grid);
    };
    const double numeric = (shifted(step) - shifted(-step)) / (2.0 * step);
    const double rel = std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-12);
    out.analytic.push_back(analytic);
    out.numeric.push_back(numeric);
    out.rel_error.push_back(rel);
    out.max_rel_error = std::max(out.max_rel_error, rel);
  }
  return out;
}

}  // namespace ritz::oracle

namespace ritz::oracle {

double sup_gap(const Trajectory& reference, std::span<const double> t, const std::vector<std::vector<double>>& theta) {
  if (t.size() != theta.size()) throw ConfigError("sup_gap: t and theta lengths differ");
  const auto& rt = reference.t;
  if (rt.size() < 2) throw ConfigError("sup_gap: reference trajectory needs at least two samples");
  double gap = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < rt.front() - 1e-12 || t[i] > rt.back() + 1e-12) {
      throw ConfigError("sup_gap: t = " + std::to_string(t[i]) + " lies outside the reference trajectory");
    }
    const auto it = std::upper_bound(rt.begin(), rt.end(), t[i]);
    const std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - rt.begin(), 1), rt.size() - 1);
    const std::size_t lo = hi - 1;
    const double s = std::clamp((t[i] - rt[lo]) / (rt[hi] - rt[lo]), 0.0, 1.0);
    const auto& a = reference.theta[lo];
    const auto& b = reference.theta[hi];
    if (theta[i].size() != a.size()) throw ConfigError("sup_gap: dimension mismatch at sample " + std::to_string(i));
    for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(theta[i][k] - (a[k] + s * (b[k] - a[k]))));
  }
  return gap;
}

}  // namespace ritz::oracle
