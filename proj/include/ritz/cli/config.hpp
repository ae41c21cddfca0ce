#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ritz/core/solver.hpp"
#include "ritz/experiments/experiments.hpp"
#include "ritz/metrics/refractive.hpp"

namespace ritz::cli {

// landscape, waveguide and bar are the three worked examples; geodesic is a
// generic boundary-value problem on one of the named metrics.
enum class ExperimentKind { kLandscape, kWaveguide, kBar, kGeodesic };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Fully resolved description of one run. Only the fields relevant to the
// experiment kind (and, for geodesic, the metric name) are read or echoed.
struct RunSpec {
  ExperimentKind experiment = ExperimentKind::kLandscape;
  std::uint64_t seed = 0;

  // metric
  std::string metric = "landscape";  // flat | sphere | landscape | waveguide | strain
  double height = 0.25;
  double frequency = 2.0;
  metrics::RefractiveParams field;
  std::string u0 = "sin_pi";
  std::string u1 = "minus_two_x_sin_pi";
  std::size_t x_points = 100;

  // arch
  experiments::NetworkKind network = experiments::NetworkKind::kMlp;
  std::vector<std::size_t> hidden{25, 25};
  double omega0 = 30.0;
  std::size_t fourier_features = 30;
  double fourier_variance = 4.0;
  std::vector<std::size_t> displacement_hidden{10, 10};

  core::TrainConfig train;
  experiments::FitConfig fit;

  std::vector<double> theta0;
  std::vector<double> theta1;
};

// Defaults for an experiment; `metric` selects the geodesic metric and is
// ignored for the fixed experiments.
RunSpec default_spec(ExperimentKind kind, const std::string& metric = "sphere");

// Canonical JSON text of the spec (sorted keys, round-trip precision).
std::string to_json_text(const RunSpec& spec);

// Applies a JSON document over the defaults of its "experiment" (and, for
// geodesic, "metric.name"). Unknown keys and type mismatches are ConfigErrors.
RunSpec parse_spec(const std::string& json_text);

void validate(const RunSpec& spec);

experiments::LandscapeConfig landscape_config(const RunSpec& spec);
experiments::WaveguideConfig waveguide_config(const RunSpec& spec);
experiments::BarConfig bar_config(const RunSpec& spec);

}  // namespace ritz::cli
