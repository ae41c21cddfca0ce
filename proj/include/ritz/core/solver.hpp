#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ritz/ad/tape.hpp"
#include "ritz/core/path.hpp"
#include "ritz/core/quadrature.hpp"
#include "ritz/metrics/metric_field.hpp"
#include "ritz/nn/batch.hpp"

namespace ritz::core {

// Ê(β) = ½ Σ_i w_i θ̂'(t_i)·g(θ̂(t_i))·θ̂'(t_i)
double energy(const PathModel& model, const metrics::MetricField& metric, const QuadGrid& grid);

struct EnergyGradient {
  double energy = 0.0;
  std::vector<double> gradient;
};

// Reusable storage for repeated gradient evaluations.
struct GradientWorkspace {
  ad::Tape tape;
  nn::TangentBatch batch;
};

// Energy and its gradient with respect to the network parameters, through
// both the velocity term and the metric's dependence on the path. The network
// and its t-derivative are evaluated for all nodes at once; the integrand at
// each node is differentiated in (θ, θ̇) on its own graph and the two pieces
// are joined by the chain rule through the ansatz.
EnergyGradient energy_and_gradient(const PathModel& model, const metrics::MetricField& metric,
                                   const QuadGrid& grid, GradientWorkspace* workspace = nullptr);

// The same quantity from a single graph recorded end to end from β, with the
// network evaluated in forward-over-reverse arithmetic. Slower; serves as the
// reference for energy_and_gradient.
EnergyGradient energy_and_gradient_graph(const PathModel& model, const metrics::MetricField& metric,
                                         const QuadGrid& grid, GradientWorkspace* workspace = nullptr);

// Energy of θ0(1-t) + θ1·t under the same quadrature.
double straight_line_energy(const metrics::MetricField& metric, std::span<const double> theta0,
                            std::span<const double> theta1, const QuadGrid& grid);

struct AdamConfig {
  double learning_rate = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected ADAM update in place. A non-finite gradient aborts with
// the step index.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, const AdamConfig& config);

struct TrainConfig {
  double learning_rate = 5e-3;
  std::size_t epochs = 10000;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t grid_points = 250;
  QuadRule quadrature = QuadRule::kTrapezoid;
  double divergence_limit = 1e12;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
};

struct ConvergenceTrace {
  std::vector<double> energy;   // energy before the update of each epoch
  std::vector<double> wall_ms;  // duration of each epoch
  double final_energy = 0.0;    // energy of the returned parameters

  std::size_t size() const { return energy.size(); }
  double best_energy() const;
};

// Raised when the energy becomes non-finite or exceeds the divergence limit.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, ConvergenceTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const ConvergenceTrace& trace() const { return trace_; }

 private:
  ConvergenceTrace trace_;
};

struct TrainResult {
  PathModel model;
  ConvergenceTrace trace;
};

using EpochCallback = std::function<void(std::size_t epoch, double energy)>;

// Full-batch ADAM on the quadrature energy for config.epochs epochs.
TrainResult train(PathModel model, const metrics::MetricField& metric, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace ritz::core
