#include "ritz/experiments/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ritz/metrics/surface.hpp"
#include "ritz/nn/batch.hpp"

namespace ritz::experiments {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> linspace01(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TrainedPath train_path(const core::PathModel& initial, const metrics::MetricField& metric,
                       const core::TrainConfig& config, const core::EpochCallback& on_epoch) {
  config.validate();
  const core::QuadGrid grid(config.grid_points, config.quadrature);
  const double e0 = core::energy(initial, metric, grid);
  const double baseline = core::straight_line_energy(metric, initial.theta0(), initial.theta1(), grid);
  const auto start = std::chrono::steady_clock::now();
  core::TrainResult r = core::train(initial, metric, config, on_epoch);
  return {std::move(r.model), std::move(r.trace), e0, baseline, seconds_since(start)};
}

double max_path_elevation(const core::PathModel& model, const metrics::LandscapeSurface& surface,
                          std::size_t samples) {
  double best = -std::numeric_limits<double>::infinity();
  for (double t : linspace01(samples)) {
    const std::vector<double> p = core::path_eval(model, t);
    best = std::max(best, surface.elevation(p[0], p[1]));
  }
  return best;
}

LandscapeRun run_landscape(const LandscapeConfig& config, const Hooks& hooks) {
  if (config.theta0.size() != 2 || config.theta1.size() != 2) throw ConfigError("landscape endpoints must be 2-vectors");
  const metrics::LandscapeSurface surface{config.height, config.frequency};
  const metrics::LandscapeMetric metric(surface);
  const auto initial = core::PathModel::initialized(config.theta0, config.theta1,
                                                    nn::Architecture::mlp(1, 2, config.hidden), config.train.seed);
  hooks.stage("train");
  LandscapeRun run{train_path(initial, metric, config.train, hooks.on_epoch), {}, {}, 0.0, 0.0};

  hooks.stage("validate");
  const core::QuadGrid grid(config.train.grid_points, config.train.quadrature);
  run.residual = oracle::el_residual(run.path.model, metric, grid);
  for (double t : grid.nodes()) {
    const std::vector<double> p = core::path_eval(run.path.model, t);
    run.embedded.push_back(metrics::landscape_surface(p, config.height, config.frequency));
  }
  run.max_elevation = max_path_elevation(run.path.model, surface, config.elevation_samples);
  const core::PathModel straight(config.theta0, config.theta1, initial.arch(),
                                 nn::NetworkParams(initial.arch().make_layout()));
  run.baseline_max_elevation = max_path_elevation(straight, surface, config.elevation_samples);
  return run;
}

std::string to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kMlp:
      return "mlp";
    case NetworkKind::kSiren:
      return "siren";
    case NetworkKind::kFourier:
      return "fourier";
  }
  return "mlp";
}

NetworkKind network_kind_from_string(const std::string& name) {
  if (name == "mlp") return NetworkKind::kMlp;
  if (name == "siren") return NetworkKind::kSiren;
  if (name == "fourier") return NetworkKind::kFourier;
  throw ConfigError("unknown architecture '" + name + "' (expected mlp, siren or fourier)");
}

nn::Architecture waveguide_architecture(const WaveguideConfig& config, std::uint64_t seed) {
  switch (config.network) {
    case NetworkKind::kMlp:
      return nn::Architecture::mlp(1, 3, config.hidden);
    case NetworkKind::kSiren:
      return nn::Architecture::siren(1, 3, config.hidden, config.omega0);
    case NetworkKind::kFourier:
      if (config.fourier_features == 0 || config.fourier_features % 2 != 0) {
        throw ConfigError("fourier_features must be a positive even number (2f)");
      }
      return nn::Architecture::fourier(
          3, config.hidden, nn::make_fourier_embedding(config.fourier_features / 2, config.fourier_variance, seed));
  }
  throw ConfigError("unknown waveguide architecture");
}

WaveguideRun run_waveguide(const WaveguideConfig& config, const Hooks& hooks) {
  if (config.theta0.size() != 3 || config.theta1.size() != 3) throw ConfigError("waveguide endpoints must be 3-vectors");
  const metrics::RefractiveField field(config.field);
  const metrics::RefractiveMetric smooth(field, metrics::IndexMode::kSmooth);
  const metrics::RefractiveMetric sharp(field, metrics::IndexMode::kSharp);
  const auto initial = core::PathModel::initialized(config.theta0, config.theta1,
                                                    waveguide_architecture(config, config.train.seed),
                                                    config.train.seed);
  hooks.stage("train");
  WaveguideRun run{train_path(initial, smooth, config.train, hooks.on_epoch), {}, 0.0, 0.0, false};

  hooks.stage("validate");
  const core::QuadGrid grid(config.train.grid_points, config.train.quadrature);
  run.residual = oracle::el_residual(run.path.model, smooth, grid);
  run.sharp_energy = core::energy(run.path.model, sharp, grid);
  run.baseline_sharp_energy = core::straight_line_energy(sharp, config.theta0, config.theta1, grid);
  run.stagnated = std::abs(run.path.trace.final_energy - run.path.baseline_energy) <= 0.25 * run.path.baseline_energy;
  return run;
}

BarProfile bar_profile(const std::string& name) {
  const double pi = std::numbers::pi;
  if (name == "sin_pi") return {name, [pi](double x) { return std::sin(pi * x); }};
  if (name == "minus_two_x_sin_pi") return {name, [pi](double x) { return -2.0 * x * std::sin(pi * x); }};
  if (name == "sin_three_pi") return {name, [pi](double x) { return std::sin(3.0 * pi * x); }};
  if (name == "zero") return {name, [](double) { return 0.0; }};
  std::string known;
  for (const auto& n : bar_profile_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown bar profile '" + name + "' (expected one of " + known + ")");
}

std::vector<std::string> bar_profile_names() { return {"sin_pi", "minus_two_x_sin_pi", "sin_three_pi", "zero"}; }

FitResult fit_endpoint(const nn::Architecture& displacement, const BarProfile& target, const core::QuadGrid& xgrid,
                       const FitConfig& config, std::uint64_t seed) {
  if (displacement.embedding() || displacement.input_dim() != 1 || displacement.output_dim() != 1) {
    throw ConfigError("displacement network must map x to a scalar");
  }
  if (!(config.learning_rate > 0.0) || config.max_epochs == 0) throw ConfigError("invalid endpoint-fit settings");
  if (std::abs(target.u(0.0)) > 1e-12 || std::abs(target.u(1.0)) > 1e-12) {
    throw ConfigError("bar profile '" + target.name + "' does not vanish at both ends");
  }

  const std::size_t nx = xgrid.size();
  std::vector<double> mask(nx), goal(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    mask[i] = core::endpoint_mask(xgrid.node(i));
    goal[i] = target.u(xgrid.node(i));
  }

  nn::NetworkParams params = nn::init_params(displacement, seed);
  std::span<double> theta = params.values();
  core::AdamState state(theta.size());
  const core::AdamConfig adam{config.learning_rate, 0.9, 0.999, 1e-8};
  nn::TangentBatch batch;
  Eigen::MatrixXd value_bar(1, static_cast<Eigen::Index>(nx));
  const Eigen::MatrixXd tangent_bar = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(nx));
  std::vector<double> grad(theta.size());

  FitResult out;
  auto evaluate = [&] {
    batch.forward(displacement, theta, xgrid.nodes());
    double mse = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double r = mask[i] * batch.value()(0, static_cast<Eigen::Index>(i)) - goal[i];
      mse += xgrid.weight(i) * r * r;
      value_bar(0, static_cast<Eigen::Index>(i)) = 2.0 * xgrid.weight(i) * r * mask[i];
    }
    return mse;
  };
  for (out.epochs = 0; out.epochs < config.max_epochs; ++out.epochs) {
    out.mse = evaluate();
    if (!std::isfinite(out.mse)) throw NumericalError("endpoint fit diverged at epoch " + std::to_string(out.epochs));
    if (out.mse < config.stop_mse) break;
    std::fill(grad.begin(), grad.end(), 0.0);
    batch.backward(value_bar, tangent_bar, grad);
    core::adam_step(theta, grad, state, adam);
  }
  if (out.epochs == config.max_epochs) out.mse = evaluate();

  const metrics::NetworkAmplitude amplitude{displacement};
  for (std::size_t i = 0; i < config.check_points; ++i) {
    const double x = config.check_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(config.check_points - 1);
    const double u = metrics::displacement(amplitude, x, std::span<const double>(theta));
    out.sup_error = std::max(out.sup_error, std::abs(u - target.u(x)));
  }
  out.theta.assign(theta.begin(), theta.end());
  if (!(out.mse <= config.tolerance)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "endpoint fit of '" << target.name << "' reached MSE " << out.mse << " after " << out.epochs
        << " epochs (tolerance " << config.tolerance << ")";
    throw ConvergenceError(msg.str());
  }
  return out;
}

nn::Architecture bar_displacement_architecture(const BarConfig& config) {
  return nn::Architecture::mlp(1, 1, config.displacement_hidden);
}

std::vector<Snapshot> displacement_snapshots(const metrics::NetworkAmplitude& amplitude, const core::PathModel& path,
                                             std::size_t times, std::size_t points) {
  std::vector<Snapshot> out;
  const std::vector<double> xs = linspace01(points);
  for (double t : linspace01(times)) {
    Snapshot s{t, xs, {}};
    const std::vector<double> theta = core::path_eval(path, t);
    for (double x : xs) s.u.push_back(metrics::displacement(amplitude, x, std::span<const double>(theta)));
    out.push_back(std::move(s));
  }
  return out;
}

BarRun run_bar(const BarConfig& config, const Hooks& hooks) {
  const nn::Architecture disp = bar_displacement_architecture(config);
  const core::QuadGrid xgrid(config.x_points);
  const std::uint64_t seed = config.train.seed;
  hooks.stage("fit");
  FitResult fit0 = fit_endpoint(disp, bar_profile(config.u0), xgrid, config.fit, seed);
  FitResult fit1 = config.u1 == config.u0 ? fit0 : fit_endpoint(disp, bar_profile(config.u1), xgrid, config.fit, seed);

  const metrics::NetworkAmplitude amplitude{disp};
  const metrics::NetworkStrainMetric metric(amplitude, config.x_points);
  const auto initial = core::PathModel::initialized(
      fit0.theta, fit1.theta, nn::Architecture::mlp(1, disp.param_count(), config.path_hidden), seed);

  const core::QuadGrid grid(config.train.grid_points, config.train.quadrature);
  oracle::GradientCheck check;
  if (config.gradient_directions > 0) {
    hooks.stage("gradient_check");
    check = oracle::gradient_check(initial, metric, grid, config.gradient_directions, seed);
    if (!(check.max_rel_error < config.gradient_tolerance)) {
      std::ostringstream msg;
      msg << "gradient check through the displacement parameters failed: relative error " << check.max_rel_error
          << " exceeds " << config.gradient_tolerance;
      throw NumericalError(msg.str());
    }
  }

  hooks.stage("train");
  BarRun run{std::move(fit0), std::move(fit1), std::move(check),
             train_path(initial, metric, config.train, hooks.on_epoch), {}, {}};
  hooks.stage("validate");
  run.snapshots = displacement_snapshots(amplitude, run.path.model, config.snapshot_times, config.snapshot_points);
  run.telescoping = power_telescoping_check(amplitude, run.path.model, xgrid, config.telescoping_points);
  return run;
}

}  // namespace ritz::experiments
