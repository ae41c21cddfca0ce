#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>

#include "ritz/cli/config.hpp"
#include "ritz/cli/runner.hpp"
#include "ritz/io/csv.hpp"
#include "ritz/io/svg.hpp"
#include "ritz/metrics/refractive.hpp"
#include "ritz/metrics/surface.hpp"
#include "ritz/oracle/oracle.hpp"

namespace {

using namespace ritz;

// Command-line values that override a spec when given.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> grid_points;
  std::optional<std::string> arch;
  std::optional<double> h;
  std::optional<double> f;
  std::optional<std::string> u0;
  std::optional<std::string> u1;

  void attach(CLI::App* app, bool terrain, bool bar) {
    app->add_option("--seed", seed, "random seed");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--lr", lr, "ADAM learning rate");
    app->add_option("--grid-points", grid_points, "quadrature nodes on [0, 1]");
    app->add_option("--arch", arch, "path network: mlp, siren or fourier");
    if (terrain) {
      app->add_option("--h", h, "landscape height");
      app->add_option("--f", f, "landscape frequency");
    }
    if (bar) {
      app->add_option("--u0", u0, "initial bar profile");
      app->add_option("--u1", u1, "final bar profile");
    }
  }

  void apply(cli::RunSpec& s) const {
    if (seed) s.seed = *seed;
    if (epochs) s.train.epochs = *epochs;
    if (lr) s.train.learning_rate = *lr;
    if (grid_points) s.train.grid_points = *grid_points;
    if (arch) s.network = experiments::network_kind_from_string(*arch);
    if (h) s.height = *h;
    if (f) s.frequency = *f;
    if (u0) s.u0 = *u0;
    if (u1) s.u1 = *u1;
  }
};

std::vector<double> parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw ConfigError(what + ": '" + cell + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

int run_example(const std::string& name, const std::optional<std::string>& config, const Overrides& o,
                const std::string& out) {
  cli::ExperimentKind kind;
  if (name == "landscape" || name == "waveguide" || name == "bar") {
    kind = cli::experiment_kind_from_string(name);
  } else {
    std::cerr << "error: unknown example '" << name << "'\nusage: ritz example {landscape|waveguide|bar} [options]\n";
    return cli::kExitConfig;
  }
  cli::RunSpec spec = config ? cli::parse_spec(io::read_file(*config)) : cli::default_spec(kind);
  if (spec.experiment != kind) throw ConfigError("config describes a '" + cli::to_string(spec.experiment) + "' run");
  o.apply(spec);
  return cli::execute(spec, out, std::cout);
}

int run_oracle(const std::string& metric_name, const std::string& theta0_text, const std::string& theta1_text,
               const std::optional<std::string>& compare, double h, double f, std::size_t steps,
               const std::string& out) {
  const auto metric = cli::make_metric(metric_name, h, f);
  const auto theta0 = parse_vector(theta0_text, "--theta0");
  const auto theta1 = parse_vector(theta1_text, "--theta1");
  if (theta0.size() != metric->dimension() || theta1.size() != metric->dimension()) {
    throw ConfigError("endpoints must have dimension " + std::to_string(metric->dimension()) + " for metric '" +
                      metric_name + "'");
  }
  std::vector<double> guess(theta0.size());
  for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = theta1[i] - theta0[i];
  oracle::ShootingConfig sc;
  sc.steps = steps;

  oracle::ShootingResult result;
  try {
    result = oracle::shoot(*metric, theta0, theta1, guess, sc);
  } catch (const oracle::ShootingError& e) {
    std::cerr << "error: " << e.what() << "\n  best miss " << io::format_double(e.best().miss) << " after "
              << e.best().iterations << " iterations, v0 =";
    for (double v : e.best().v0) std::cerr << " " << io::format_double(v);
    std::cerr << "\n";
    return cli::kExitOracle;
  }
  std::filesystem::create_directories(out);
  io::write_file_atomic(std::filesystem::path(out) / "shooting.csv", io::to_csv(cli::trajectory_table(result.trajectory)));
  std::cout << "v0";
  for (double v : result.v0) std::cout << " " << io::format_double(v);
  std::cout << "\nmiss " << io::format_double(result.miss) << "\niterations " << result.iterations << "\nenergy "
            << io::format_double(result.energy) << "\n";

  if (compare) {
    const oracle::Trajectory path = cli::trajectory_from_table(io::read_csv(*compare));
    if (path.theta.front().size() != metric->dimension()) throw ConfigError("compared path has the wrong dimension");
    if (path.theta_dot.front().empty()) throw ConfigError("compared path has no theta_dot columns");
    const double e = path.energy(*metric);
    const double gap = oracle::sup_gap(result.trajectory, path.t, path.theta);
    std::cout << "path energy " << io::format_double(e) << "\nrelative energy gap "
              << io::format_double(std::abs(e - result.energy) / std::abs(result.energy)) << "\nsup gap "
              << io::format_double(gap) << "\n";
  }
  return cli::kExitOk;
}

int run_residual(const std::string& path_csv, const std::string& metric_name, double h, double f,
                 const std::string& out) {
  const auto metric = cli::make_metric(metric_name, h, f);
  const oracle::Trajectory path = cli::trajectory_from_table(io::read_csv(path_csv));
  const auto report = oracle::el_residual_sampled(path.t, path.theta, *metric);
  io::write_file_atomic(out, io::to_csv(cli::residual_table(report)));
  std::cout << "rms " << io::format_double(report.rms) << "\nmax " << io::format_double(report.max) << "\n";
  return cli::kExitOk;
}

int run_export_svg(const std::string& input, const std::string& out, const std::optional<double>& h,
                   const std::optional<double>& f, std::size_t curves) {
  const io::CsvTable table = io::read_csv(input);
  io::SvgPlot plot;
  const bool snapshots = table.header == std::vector<std::string>{"t", "x", "u"};
  if (snapshots) {
    // One curve u(x) per t; a subset of about `curves` evenly spaced times.
    std::map<double, io::Polyline> by_t;
    for (const auto& r : table.rows) by_t[r[0]].points.push_back({r[1], r[2]});
    const std::size_t n = by_t.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + curves - 1) / std::max<std::size_t>(curves, 1));
    std::size_t i = 0;
    for (auto& [t, line] : by_t) {
      if (i % stride == 0 || i + 1 == n) plot.lines.push_back(std::move(line));
      ++i;
    }
    plot.title = "displacement snapshots u(x)";
  } else {
    const oracle::Trajectory path = cli::trajectory_from_table(table);
    if (path.theta.front().size() < 2) throw ConfigError("path needs at least two coordinates to project");
    if (h && f) {
      const metrics::LandscapeSurface surface{*h, *f};
      std::vector<double> levels;
      for (int k = 1; k <= 6; ++k) levels.push_back(*h * k / 7.0);
      plot.lines = io::contour_segments([&](double x, double y) { return surface.elevation(x, y); }, -1.0, 1.0,
                                        -1.0, 1.0, 121, levels, "#b0b0b0");
    }
    io::Polyline line;
    line.stroke = "#c0392b";
    line.width = 2.0;
    for (const auto& th : path.theta) line.points.push_back({th[0], th[1]});
    plot.lines.push_back(std::move(line));
    plot.title = "path projection (theta_0, theta_1)";
  }
  io::write_file_atomic(out, io::render_svg(plot));
  return cli::kExitOk;
}

int run_export_heightmap(double h, double f, std::size_t n, const std::string& out) {
  if (n < 2) throw ConfigError("--n must be at least 2");
  const metrics::LandscapeSurface surface{h, f};
  io::CsvTable table;
  table.header = {"x", "y", "z"};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
      const double y = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
      table.rows.push_back({x, y, surface.elevation(x, y)});
    }
  }
  io::write_file_atomic(out, io::to_csv(table));
  return cli::kExitOk;
}

int run_export_volume(std::size_t n, bool sharp, const std::string& out) {
  if (n < 2) throw ConfigError("--n must be at least 2");
  const metrics::RefractiveField field;
  io::CsvTable table;
  table.header = {"x", "y", "z", "n"};
  auto at = [n](std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1); };
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const metrics::Point3 p{at(i), at(j), at(k)};
        table.rows.push_back(
            {p[0], p[1], p[2], field.refractive_index(p, sharp ? metrics::IndexMode::kSharp : metrics::IndexMode::kSmooth)});
      }
  io::write_file_atomic(out, io::to_csv(table));
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep Ritz geodesic solver"};
  // --h is the landscape height, so help is long-form only.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cli::kToolVersion));

  std::string out = "run";
  std::optional<std::string> config;

  auto* example = app.add_subcommand("example", "run one of the worked examples");
  std::string example_name;
  Overrides example_over;
  example->add_option("name", example_name, "landscape, waveguide or bar")->required();
  example->add_option("--config", config, "JSON run config");
  example->add_option("--out", out, "run directory");
  example_over.attach(example, true, true);

  auto* solve = app.add_subcommand("solve", "run a JSON config (any experiment, including geodesic)");
  Overrides solve_over;
  solve->add_option("--config", config, "JSON run config")->required();
  solve->add_option("--out", out, "run directory");
  solve_over.attach(solve, true, true);

  auto* oracle_cmd = app.add_subcommand("oracle", "shooting-method geodesic between two points");
  std::string oracle_metric, theta0, theta1;
  std::optional<std::string> compare;
  double h = 0.25, f = 2.0;
  std::size_t steps = 1000;
  std::string oracle_out = "oracle";
  oracle_cmd->add_option("metric", oracle_metric, "flat, sphere, landscape or waveguide")->required();
  oracle_cmd->add_option("--theta0", theta0, "start point, comma separated")->required();
  oracle_cmd->add_option("--theta1", theta1, "end point, comma separated")->required();
  oracle_cmd->add_option("--compare", compare, "path.csv of a Deep Ritz run");
  oracle_cmd->add_option("--steps", steps, "RK4 steps");
  oracle_cmd->add_option("--h", h, "landscape height");
  oracle_cmd->add_option("--f", f, "landscape frequency");
  oracle_cmd->add_option("--out", oracle_out, "output directory for shooting.csv");

  auto* residual = app.add_subcommand("residual", "geodesic-equation residual of a sampled path");
  std::string residual_path, residual_metric, residual_out = "residual.csv";
  residual->add_option("path", residual_path, "path.csv")->required();
  residual->add_option("metric", residual_metric, "flat, sphere, landscape or waveguide")->required();
  residual->add_option("--h", h, "landscape height");
  residual->add_option("--f", f, "landscape frequency");
  residual->add_option("--out", residual_out, "output CSV");

  auto* export_cmd = app.add_subcommand("export", "SVG plots and sampled fields");
  export_cmd->require_subcommand(1);
  auto* svg = export_cmd->add_subcommand("svg", "plot a path.csv or snapshots.csv");
  std::string svg_in, svg_out = "plot.svg";
  std::optional<double> svg_h, svg_f;
  std::size_t curves = 11;
  svg->add_option("input", svg_in, "path.csv or snapshots.csv")->required();
  svg->add_option("--out", svg_out, "output SVG");
  svg->add_option("--h", svg_h, "draw landscape contours with this height");
  svg->add_option("--f", svg_f, "landscape frequency for the contours");
  svg->add_option("--curves", curves, "number of snapshot curves");
  auto* heightmap = export_cmd->add_subcommand("heightmap", "landscape elevation on a grid");
  std::size_t grid_n = 101;
  std::string field_out = "field.csv";
  heightmap->add_option("--h", h, "landscape height");
  heightmap->add_option("--f", f, "landscape frequency");
  heightmap->add_option("--n", grid_n, "samples per axis");
  heightmap->add_option("--out", field_out, "output CSV");
  auto* volume = export_cmd->add_subcommand("volume", "refractive index on a grid in [-1, 1]^3");
  bool sharp = false;
  volume->add_option("--n", grid_n, "samples per axis");
  volume->add_flag("--sharp", sharp, "piecewise-constant index instead of the smoothed one");
  volume->add_option("--out", field_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  try {
    if (*example) return run_example(example_name, config, example_over, out);
    if (*solve) {
      cli::RunSpec spec = cli::parse_spec(io::read_file(*config));
      solve_over.apply(spec);
      return cli::execute(spec, out, std::cout);
    }
    if (*oracle_cmd) return run_oracle(oracle_metric, theta0, theta1, compare, h, f, steps, oracle_out);
    if (*residual) return run_residual(residual_path, residual_metric, h, f, residual_out);
    if (*svg) return run_export_svg(svg_in, svg_out, svg_h, svg_f, curves);
    if (*heightmap) return run_export_heightmap(h, f, grid_n, field_out);
    if (*volume) return run_export_volume(grid_n, sharp, field_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfig;
  }
  return cli::kExitConfig;
}
