#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ritz/core/path.hpp"
#include "ritz/core/quadrature.hpp"
#include "ritz/core/solver.hpp"
#include "ritz/metrics/refractive.hpp"
#include "ritz/metrics/strain.hpp"
#include "ritz/metrics/surface.hpp"
#include "ritz/nn/network.hpp"
#include "ritz/oracle/oracle.hpp"

namespace ritz::experiments {

// Observers for a run: per-epoch energies and the start of each named stage
// (fit, gradient_check, train, validate).
struct Hooks {
  core::EpochCallback on_epoch;
  std::function<void(const std::string& stage)> on_stage;

  void stage(const std::string& name) const {
    if (on_stage) on_stage(name);
  }
};

// A trained path together with the quantities every run reports.
struct TrainedPath {
  core::PathModel model;
  core::ConvergenceTrace trace;
  double initial_energy = 0.0;
  double baseline_energy = 0.0;  // straight line between the endpoints
  double train_seconds = 0.0;
};

TrainedPath train_path(const core::PathModel& initial, const metrics::MetricField& metric,
                       const core::TrainConfig& config, const core::EpochCallback& on_epoch = {});

// ---- landscape ----

struct LandscapeConfig {
  double height = 0.25;
  double frequency = 2.0;
  std::vector<double> theta0{-1.0, -1.0};
  std::vector<double> theta1{1.0, 1.0};
  std::vector<std::size_t> hidden{25, 25};
  core::TrainConfig train;
  std::size_t elevation_samples = 2001;  // dense t samples for the elevation maxima
};

struct LandscapeRun {
  TrainedPath path;
  oracle::ResidualReport residual;
  std::vector<std::array<double, 3>> embedded;  // surface map of θ̂ at the grid nodes
  double max_elevation = 0.0;
  double baseline_max_elevation = 0.0;
};

LandscapeRun run_landscape(const LandscapeConfig& config, const Hooks& hooks = {});

// Largest elevation of θ̂(t) over `samples` uniform t values.
double max_path_elevation(const core::PathModel& model, const metrics::LandscapeSurface& surface,
                          std::size_t samples);

// ---- waveguide ----

enum class NetworkKind { kMlp, kSiren, kFourier };

std::string to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& name);

struct WaveguideConfig {
  NetworkKind network = NetworkKind::kFourier;
  std::vector<std::size_t> hidden{15, 15};
  std::size_t fourier_features = 30;  // 2f
  double fourier_variance = 4.0;
  double omega0 = 30.0;
  metrics::RefractiveParams field;
  std::vector<double> theta0{0.0, 0.0, 1.0};
  std::vector<double> theta1{0.0, 0.0, -1.0};
  core::TrainConfig train = [] {
    core::TrainConfig c;
    c.epochs = 20000;
    return c;
  }();
};

struct WaveguideRun {
  TrainedPath path;                 // smooth field
  oracle::ResidualReport residual;  // smooth field
  double sharp_energy = 0.0;
  double baseline_sharp_energy = 0.0;
  bool stagnated = false;  // final energy within 25% of the straight line
};

nn::Architecture waveguide_architecture(const WaveguideConfig& config, std::uint64_t seed);
WaveguideRun run_waveguide(const WaveguideConfig& config, const Hooks& hooks = {});

// ---- elastic bar ----

struct BarProfile {
  std::string name;
  std::function<double(double)> u;
};

// sin(πx), −2x·sin(πx), sin(3πx), 0
BarProfile bar_profile(const std::string& name);
std::vector<std::string> bar_profile_names();

struct FitConfig {
  double learning_rate = 5e-3;
  std::size_t max_epochs = 20000;
  double stop_mse = 1e-7;   // early stop
  double tolerance = 1e-5;  // failure above this after max_epochs
  std::size_t check_points = 200;
};

struct FitResult {
  std::vector<double> theta;
  double mse = 0.0;        // quadrature MSE ∫(û − u)² dx
  double sup_error = 0.0;  // max |û − u| over the check points
  std::size_t epochs = 0;
};

// ADAM on ∫(û(x; θ) − u(x))² dx over the spatial grid. Raises ConvergenceError
// with the achieved MSE if it stays above the tolerance.
FitResult fit_endpoint(const nn::Architecture& displacement, const BarProfile& target, const core::QuadGrid& xgrid,
                       const FitConfig& config, std::uint64_t seed);

struct TelescopingReport {
  double lhs = 0.0;  // ∫ dU/dt dt
  double rhs = 0.0;  // U(θ(1)) − U(θ(0))
  double gap = 0.0;  // |lhs − rhs|
};

// Integrates the strain power along the path by the trapezoid rule on
// `t_points` nodes and compares it with the change in strain energy.
template <class Model>
TelescopingReport power_telescoping_check(const Model& model, const core::PathModel& path,
                                          const core::QuadGrid& xgrid, std::size_t t_points) {
  const core::QuadGrid tgrid(t_points);
  TelescopingReport r;
  r.lhs = tgrid.integrate([&](double t) {
    const core::PathPoint p = core::path_point(path, t);
    return metrics::strain_power(model, std::span<const double>(p.position), p.velocity, xgrid);
  });
  r.rhs = metrics::strain_energy(model, std::span<const double>(path.theta1()), xgrid) -
          metrics::strain_energy(model, std::span<const double>(path.theta0()), xgrid);
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

struct BarConfig {
  std::string u0 = "sin_pi";
  std::string u1 = "minus_two_x_sin_pi";
  std::vector<std::size_t> displacement_hidden{10, 10};
  std::vector<std::size_t> path_hidden{25, 25};
  std::size_t x_points = 100;
  FitConfig fit;
  core::TrainConfig train = [] {
    core::TrainConfig c;
    c.epochs = 2500;
    return c;
  }();
  std::size_t gradient_directions = 3;
  double gradient_tolerance = 1e-4;
  std::size_t snapshot_times = 11;
  std::size_t snapshot_points = 101;
  std::size_t telescoping_points = 1001;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;
};

struct BarRun {
  FitResult fit0;
  FitResult fit1;
  oracle::GradientCheck gradient;
  TrainedPath path;
  std::vector<Snapshot> snapshots;
  TelescopingReport telescoping;
};

nn::Architecture bar_displacement_architecture(const BarConfig& config);

// Fit both endpoints, check the gradient through θ(β), train the path and
// evaluate the diagnostics. Identical profiles share one fit, so θ0 = θ1.
BarRun run_bar(const BarConfig& config, const Hooks& hooks = {});

std::vector<Snapshot> displacement_snapshots(const metrics::NetworkAmplitude& amplitude, const core::PathModel& path,
                                             std::size_t times, std::size_t points);

}  // namespace ritz::experiments
