#include "ritz/core/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace ritz::core {

namespace {

void check_metric(const PathModel& model, const metrics::MetricField& metric) {
  if (metric.dimension() != model.dimension()) {
    throw ConfigError("metric '" + metric.name() + "' has dimension " + std::to_string(metric.dimension()) +
                      " but the path has dimension " + std::to_string(model.dimension()));
  }
}

[[noreturn]] void report_non_finite(double t, std::span<const double> theta) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite energy integrand at t = " << t << ", theta = [";
  for (std::size_t i = 0; i < theta.size(); ++i) msg << (i ? ", " : "") << theta[i];
  msg << "]";
  throw NumericalError(msg.str());
}

}  // namespace

double energy(const PathModel& model, const metrics::MetricField& metric, const QuadGrid& grid) {
  check_metric(model, metric);
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    const PathPoint p = path_point(model, t);
    const double q = metric.quadratic_form(p.position, p.velocity);
    if (!std::isfinite(q)) report_non_finite(t, p.position);
    e += 0.5 * grid.coefficient(i) * q;
  }
  return e / grid.divisor();
}

EnergyGradient energy_and_gradient(const PathModel& model, const metrics::MetricField& metric,
                                   const QuadGrid& grid, GradientWorkspace* workspace) {
  check_metric(model, metric);
  GradientWorkspace local;
  GradientWorkspace& ws = workspace ? *workspace : local;
  const std::size_t k = model.dimension();
  const std::size_t n = grid.size();
  const Eigen::Index kk = static_cast<Eigen::Index>(k);

  ws.batch.forward(model.arch(), model.params().values(), grid.nodes());
  const Eigen::MatrixXd& net = ws.batch.value();
  const Eigen::MatrixXd& dnet = ws.batch.tangent();
  Eigen::MatrixXd net_bar(kk, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd dnet_bar(kk, static_cast<Eigen::Index>(n));

  std::vector<double> position(k), velocity(k);
  std::vector<ad::Var> theta(k), theta_dot(k);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.node(i);
    const Eigen::Index c = static_cast<Eigen::Index>(i);
    const ad::Dual<double> mask = endpoint_mask(ad::Dual<double>(t, 1.0));
    ad::Tape& tape = ws.tape;
    tape.clear();
    for (std::size_t j = 0; j < k; ++j) {
      const Eigen::Index r = static_cast<Eigen::Index>(j);
      const double th0 = model.theta0()[j];
      const double th1 = model.theta1()[j];
      position[j] = th0 * (1.0 - t) + th1 * t + mask.value * net(r, c);
      velocity[j] = (th1 - th0) + (mask.deriv * net(r, c) + mask.value * dnet(r, c));
      theta[j] = tape.leaf(position[j]);
    }
    for (std::size_t j = 0; j < k; ++j) theta_dot[j] = tape.leaf(velocity[j]);
    const ad::Var q = metric.quadratic_form(theta, theta_dot);
    if (!std::isfinite(q.value())) report_non_finite(t, position);
    const double w = 0.5 * grid.weight(i);
    e += 0.5 * grid.coefficient(i) * q.value();

    std::vector<double> g(2 * k, 0.0);
    std::vector<ad::Var> leaves(theta);
    leaves.insert(leaves.end(), theta_dot.begin(), theta_dot.end());
    tape.backward(q, w, leaves, g);
    for (std::size_t j = 0; j < k; ++j) {
      const Eigen::Index r = static_cast<Eigen::Index>(j);
      // θ = … + m·N,  θ̇ = … + m'·N + m·N'
      net_bar(r, c) = mask.value * g[j] + mask.deriv * g[k + j];
      dnet_bar(r, c) = mask.value * g[k + j];
    }
  }

  EnergyGradient result;
  result.energy = e / grid.divisor();
  result.gradient.assign(model.params().size(), 0.0);
  ws.batch.backward(net_bar, dnet_bar, result.gradient);
  return result;
}

EnergyGradient energy_and_gradient_graph(const PathModel& model, const metrics::MetricField& metric,
                                         const QuadGrid& grid, GradientWorkspace* workspace) {
  check_metric(model, metric);
  GradientWorkspace local;
  ad::Tape& tape = workspace ? workspace->tape : local.tape;
  tape.clear();

  const std::vector<ad::Var> leaves = tape.leaves(model.params().values());
  const std::span<const ad::Var> params(leaves);
  const std::size_t k = model.dimension();
  std::vector<ad::Var> theta(k), velocity(k);
  std::vector<double> position(k);
  ad::Tape::Builder total;
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    const auto p = path_eval(model, params, ad::Dual<ad::Var>(ad::Var(t), ad::Var(1.0)));
    for (std::size_t j = 0; j < k; ++j) {
      theta[j] = p[j].value;
      velocity[j] = p[j].deriv;
      position[j] = p[j].value.value();
    }
    const ad::Var q = metric.quadratic_form(theta, velocity);
    if (!std::isfinite(q.value())) report_non_finite(t, position);
    const double w = 0.5 * grid.weight(i);
    total.add(q, w);
    e += 0.5 * grid.coefficient(i) * q.value();
  }
  e /= grid.divisor();
  const ad::Var out = total.finish(e);

  EnergyGradient result;
  result.energy = e;
  result.gradient.assign(leaves.size(), 0.0);
  tape.backward(out, 1.0, leaves, result.gradient);
  return result;
}

double straight_line_energy(const metrics::MetricField& metric, std::span<const double> theta0,
                            std::span<const double> theta1, const QuadGrid& grid) {
  if (theta0.size() != theta1.size() || theta0.size() != metric.dimension()) {
    throw ConfigError("straight-line endpoints do not match the metric dimension");
  }
  const std::size_t k = theta0.size();
  std::vector<double> pos(k), vel(k);
  for (std::size_t j = 0; j < k; ++j) vel[j] = theta1[j] - theta0[j];
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    for (std::size_t j = 0; j < k; ++j) pos[j] = theta0[j] * (1.0 - t) + theta1[j] * t;
    const double q = metric.quadratic_form(pos, vel);
    if (!std::isfinite(q)) report_non_finite(t, pos);
    e += 0.5 * grid.coefficient(i) * q;
  }
  return e / grid.divisor();
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, const AdamConfig& config) {
  const std::size_t n = params.size();
  if (grad.size() != n) throw ConfigError("gradient length does not match parameter length");
  if (state.m.size() != n || state.v.size() != n) {
    if (state.step != 0) throw ConfigError("optimizer state does not match parameter length");
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericalError("non-finite gradient at epoch " + std::to_string(state.step) + " (component " +
                           std::to_string(i) + ")");
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.eps);
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (!(divergence_limit > 0.0)) throw ConfigError("divergence limit must be positive");
}

double ConvergenceTrace::best_energy() const {
  if (energy.empty()) return final_energy;
  return std::min(final_energy, *std::min_element(energy.begin(), energy.end()));
}

TrainResult train(PathModel model, const metrics::MetricField& metric, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  check_metric(model, metric);
  const QuadGrid grid(config.grid_points, config.quadrature);
  const AdamConfig adam = config.adam();
  AdamState state(model.params().size());
  GradientWorkspace workspace;
  ConvergenceTrace trace;
  trace.energy.reserve(config.epochs);
  trace.wall_ms.reserve(config.epochs);

  auto diverged = [&](double e) { return !std::isfinite(e) || e > config.divergence_limit; };
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EnergyGradient eg;
    try {
      eg = energy_and_gradient(model, metric, grid, &workspace);
    } catch (const NumericalError& e) {
      throw DivergenceError("training failed at epoch " + std::to_string(epoch) + ": " + e.what(), trace);
    }
    if (diverged(eg.energy)) {
      throw DivergenceError("energy diverged at epoch " + std::to_string(epoch), trace);
    }
    try {
      adam_step(model.params().values(), eg.gradient, state, adam);
    } catch (const NumericalError& e) {
      throw DivergenceError(e.what(), trace);
    }
    const auto stop = std::chrono::steady_clock::now();
    trace.energy.push_back(eg.energy);
    trace.wall_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    if (on_epoch) on_epoch(epoch, eg.energy);
  }
  trace.final_energy = energy(model, metric, grid);
  if (diverged(trace.final_energy)) throw DivergenceError("energy diverged after the final update", trace);
  return {std::move(model), std::move(trace)};
}

}  // namespace ritz::core
