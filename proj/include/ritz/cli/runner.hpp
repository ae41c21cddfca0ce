#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "ritz/cli/config.hpp"
#include "ritz/core/path.hpp"
#include "ritz/core/quadrature.hpp"
#include "ritz/io/csv.hpp"
#include "ritz/metrics/metric_field.hpp"
#include "ritz/oracle/oracle.hpp"

namespace ritz::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitOracle = 4;

// flat, sphere, landscape (height, frequency) or waveguide (smooth field).
std::unique_ptr<metrics::MetricField> make_metric(const std::string& name, double height = 0.25,
                                                  double frequency = 2.0, const metrics::RefractiveParams& field = {});

// Columns t, theta_0.., theta_dot_0.. at the grid nodes.
io::CsvTable path_table(const core::PathModel& model, const core::QuadGrid& grid);
io::CsvTable trajectory_table(const oracle::Trajectory& trajectory);
// Reads t and theta_* (and theta_dot_* when present) from a path table.
oracle::Trajectory trajectory_from_table(const io::CsvTable& table);
io::CsvTable residual_table(const oracle::ResidualReport& report);
io::CsvTable convergence_table(const core::ConvergenceTrace& trace);

// Runs the spec and fills `out` with config.echo, path.csv, convergence.csv,
// residual.csv and the experiment's extra files, then writes manifest.json
// atomically, also when a stage fails. Returns the process exit code.
int execute(const RunSpec& spec, const std::filesystem::path& out, std::ostream& log);

}  // namespace ritz::cli
