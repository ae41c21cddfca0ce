#include "ritz/cli/runner.hpp"

#include <chrono>
#include <json.hpp>
#include <ostream>

#include "ritz/error.hpp"
#include "ritz/experiments/experiments.hpp"
#include "ritz/metrics/refractive.hpp"
#include "ritz/metrics/surface.hpp"

namespace ritz::cli {

using nlohmann::json;

namespace {

std::vector<std::string> indexed(const std::string& stem, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

nn::Architecture path_architecture(const RunSpec& s, std::size_t dim) {
  switch (s.network) {
    case experiments::NetworkKind::kMlp:
      return nn::Architecture::mlp(1, dim, s.hidden);
    case experiments::NetworkKind::kSiren:
      return nn::Architecture::siren(1, dim, s.hidden, s.omega0);
    case experiments::NetworkKind::kFourier:
      return nn::Architecture::fourier(
          dim, s.hidden, nn::make_fourier_embedding(s.fourier_features / 2, s.fourier_variance, s.seed));
  }
  throw ConfigError("unknown architecture");
}

json trace_summary(const experiments::TrainedPath& p) {
  return {{"initial_energy", p.initial_energy},
          {"final_energy", p.trace.final_energy},
          {"best_energy", p.trace.best_energy()},
          {"baseline_energy", p.baseline_energy},
          {"epochs", p.trace.size()},
          {"train_seconds", p.train_seconds}};
}

json residual_summary(const oracle::ResidualReport& r) { return {{"rms", r.rms}, {"max", r.max}}; }

io::CsvTable embedded_table(const std::vector<double>& t, const std::vector<std::array<double, 3>>& xyz,
                            const std::vector<double>* extra, const std::string& extra_name) {
  io::CsvTable table;
  table.header = {"t", "x", "y", "z"};
  if (extra) table.header.push_back(extra_name);
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> row{t[i], xyz[i][0], xyz[i][1], xyz[i][2]};
    if (extra) row.push_back((*extra)[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct Outputs {
  std::filesystem::path dir;

  void csv(const std::string& name, const io::CsvTable& table) const {
    io::write_file_atomic(dir / name, io::to_csv(table));
  }
};

}  // namespace

std::unique_ptr<metrics::MetricField> make_metric(const std::string& name, double height, double frequency,
                                                  const metrics::RefractiveParams& field) {
  if (name == "flat") return std::make_unique<metrics::ConstantMetric>(metrics::ConstantMetric::identity(2));
  if (name == "sphere") return std::make_unique<metrics::SphereMetric>(metrics::SphereSurface{});
  if (name == "landscape") {
    return std::make_unique<metrics::LandscapeMetric>(metrics::LandscapeSurface{height, frequency});
  }
  if (name == "waveguide") {
    return std::make_unique<metrics::RefractiveMetric>(metrics::RefractiveField(field), metrics::IndexMode::kSmooth);
  }
  throw ConfigError("unknown metric '" + name + "' (expected flat, sphere, landscape or waveguide)");
}

io::CsvTable path_table(const core::PathModel& model, const core::QuadGrid& grid) {
  const std::size_t k = model.dimension();
  io::CsvTable table;
  table.header = {"t"};
  for (const auto& h : indexed("theta", k)) table.header.push_back(h);
  for (const auto& h : indexed("theta_dot", k)) table.header.push_back(h);
  for (double t : grid.nodes()) {
    const core::PathPoint p = core::path_point(model, t);
    std::vector<double> row{t};
    row.insert(row.end(), p.position.begin(), p.position.end());
    row.insert(row.end(), p.velocity.begin(), p.velocity.end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

io::CsvTable trajectory_table(const oracle::Trajectory& tr) {
  const std::size_t k = tr.theta.empty() ? 0 : tr.theta.front().size();
  io::CsvTable table;
  table.header = {"t"};
  for (const auto& h : indexed("theta", k)) table.header.push_back(h);
  for (const auto& h : indexed("theta_dot", k)) table.header.push_back(h);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    std::vector<double> row{tr.t[i]};
    row.insert(row.end(), tr.theta[i].begin(), tr.theta[i].end());
    row.insert(row.end(), tr.theta_dot[i].begin(), tr.theta_dot[i].end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

oracle::Trajectory trajectory_from_table(const io::CsvTable& table) {
  const std::size_t tc = table.column("t");
  std::vector<std::size_t> pos, vel;
  for (std::size_t i = 0;; ++i) {
    const std::string name = "theta_" + std::to_string(i);
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) break;
    pos.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  if (pos.empty()) throw ConfigError("path csv has no theta_0 column");
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const auto it = std::find(table.header.begin(), table.header.end(), "theta_dot_" + std::to_string(i));
    if (it == table.header.end()) break;
    vel.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  if (!vel.empty() && vel.size() != pos.size()) throw ConfigError("path csv has an incomplete set of theta_dot columns");
  oracle::Trajectory tr;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (r > 0 && !(row[tc] > tr.t.back())) {
      throw ConfigError("path csv: t is not strictly increasing at data row " + std::to_string(r + 1));
    }
    tr.t.push_back(row[tc]);
    std::vector<double> th, td;
    for (std::size_t c : pos) th.push_back(row[c]);
    for (std::size_t c : vel) td.push_back(row[c]);
    tr.theta.push_back(std::move(th));
    tr.theta_dot.push_back(std::move(td));
  }
  if (tr.t.size() < 3) throw ConfigError("path csv needs at least three rows");
  return tr;
}

io::CsvTable residual_table(const oracle::ResidualReport& report) {
  const std::size_t k = report.residual.empty() ? 0 : report.residual.front().size();
  io::CsvTable table;
  table.header = {"t"};
  for (const auto& h : indexed("r", k)) table.header.push_back(h);
  table.header.push_back("norm");
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    std::vector<double> row{report.t[i]};
    double n2 = 0.0;
    for (double r : report.residual[i]) {
      row.push_back(r);
      n2 += r * r;
    }
    row.push_back(std::sqrt(n2));
    table.rows.push_back(std::move(row));
  }
  return table;
}

io::CsvTable convergence_table(const core::ConvergenceTrace& trace) {
  io::CsvTable table;
  table.header = {"epoch", "energy", "wall_ms"};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    table.rows.push_back({static_cast<double>(i), trace.energy[i], trace.wall_ms[i]});
  }
  return table;
}

int execute(const RunSpec& spec, const std::filesystem::path& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  json manifest;
  manifest["tool"] = "ritz";
  manifest["tool_version"] = kToolVersion;
  manifest["experiment"] = to_string(spec.experiment);
  manifest["seed"] = spec.seed;
  json stages = json::array();
  std::string stage = "config";
  auto begin_stage = [&](const std::string& name) {
    if (!stages.empty()) stages.back()["status"] = "ok";
    stage = name;
    stages.push_back({{"name", name}, {"status", "running"}});
    log << "[" << name << "]\n" << std::flush;
  };

  int code = kExitOk;
  const Outputs files{out};
  try {
    std::filesystem::create_directories(out);
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: cannot create output directory: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    begin_stage("config");
    validate(spec);
    const std::string echo = to_json_text(spec);
    manifest["config"] = json::parse(echo);
    io::write_file_atomic(out / "config.echo", echo);

    experiments::Hooks hooks;
    hooks.on_stage = begin_stage;
    const std::size_t report_every = std::max<std::size_t>(1, spec.train.epochs / 10);
    hooks.on_epoch = [&](std::size_t epoch, double e) {
      if (epoch % report_every == 0) log << "  epoch " << epoch << "  energy " << io::format_double(e) << "\n";
    };
    const core::QuadGrid grid(spec.train.grid_points, spec.train.quadrature);

    switch (spec.experiment) {
      case ExperimentKind::kLandscape: {
        const auto cfg = landscape_config(spec);
        const auto run = experiments::run_landscape(cfg, hooks);
        begin_stage("write");
        files.csv("path.csv", path_table(run.path.model, grid));
        files.csv("path_embedded.csv", embedded_table(std::vector<double>(grid.nodes().begin(), grid.nodes().end()),
                                                      run.embedded, nullptr, ""));
        files.csv("convergence.csv", convergence_table(run.path.trace));
        files.csv("residual.csv", residual_table(run.residual));
        manifest.update(trace_summary(run.path));
        manifest["diagnostics"] = {{"residual", residual_summary(run.residual)},
                                   {"max_elevation", run.max_elevation},
                                   {"baseline_max_elevation", run.baseline_max_elevation}};
        break;
      }
      case ExperimentKind::kWaveguide: {
        const auto cfg = waveguide_config(spec);
        const auto run = experiments::run_waveguide(cfg, hooks);
        begin_stage("write");
        const metrics::RefractiveField field(cfg.field);
        std::vector<double> ts(grid.nodes().begin(), grid.nodes().end()), index;
        std::vector<std::array<double, 3>> xyz;
        for (double t : ts) {
          const auto p = core::path_eval(run.path.model, t);
          xyz.push_back({p[0], p[1], p[2]});
          index.push_back(field.refractive_index(xyz.back(), metrics::IndexMode::kSmooth));
        }
        files.csv("path.csv", path_table(run.path.model, grid));
        files.csv("path_embedded.csv", embedded_table(ts, xyz, &index, "n"));
        files.csv("convergence.csv", convergence_table(run.path.trace));
        files.csv("residual.csv", residual_table(run.residual));
        manifest.update(trace_summary(run.path));
        manifest["diagnostics"] = {
            {"residual", residual_summary(run.residual)},
            {"field", "smooth"},
            {"sharp_energy", run.sharp_energy},
            {"baseline_sharp_energy", run.baseline_sharp_energy},
            {"energy_ratio", run.path.trace.final_energy / run.path.baseline_energy},
            {"straight_line_stagnation", run.stagnated}};
        break;
      }
      case ExperimentKind::kBar: {
        const auto cfg = bar_config(spec);
        const auto run = experiments::run_bar(cfg, hooks);
        begin_stage("write");
        files.csv("path.csv", path_table(run.path.model, grid));
        io::CsvTable snaps;
        snaps.header = {"t", "x", "u"};
        for (const auto& s : run.snapshots)
          for (std::size_t i = 0; i < s.x.size(); ++i) snaps.rows.push_back({s.t, s.x[i], s.u[i]});
        files.csv("snapshots.csv", snaps);
        files.csv("convergence.csv", convergence_table(run.path.trace));
        manifest.update(trace_summary(run.path));
        manifest["deformation_energy"] = run.path.trace.final_energy;
        manifest["diagnostics"] = {
            {"fit", {{"u0", {{"mse", run.fit0.mse}, {"sup_error", run.fit0.sup_error}, {"epochs", run.fit0.epochs}}},
                     {"u1", {{"mse", run.fit1.mse}, {"sup_error", run.fit1.sup_error}, {"epochs", run.fit1.epochs}}}}},
            {"gradient_check_max_rel_error", run.gradient.max_rel_error},
            {"telescoping", {{"lhs", run.telescoping.lhs}, {"rhs", run.telescoping.rhs}, {"gap", run.telescoping.gap}}},
            {"residual", "not computed: Christoffel symbols of the 140-parameter strain metric are out of budget"},
            {"path_network", {{"kind", "mlp"}, {"hidden", cfg.path_hidden}}}};
        break;
      }
      case ExperimentKind::kGeodesic: {
        const auto metric = make_metric(spec.metric, spec.height, spec.frequency, spec.field);
        const auto initial = core::PathModel::initialized(
            spec.theta0, spec.theta1, path_architecture(spec, spec.theta0.size()), spec.seed);
        core::TrainConfig train = spec.train;
        train.seed = spec.seed;
        begin_stage("train");
        const auto path = experiments::train_path(initial, *metric, train, hooks.on_epoch);
        begin_stage("validate");
        const auto residual = oracle::el_residual(path.model, *metric, grid);
        const auto residual0 = oracle::el_residual(initial, *metric, grid);
        begin_stage("write");
        files.csv("path.csv", path_table(path.model, grid));
        files.csv("convergence.csv", convergence_table(path.trace));
        files.csv("residual.csv", residual_table(residual));
        manifest.update(trace_summary(path));
        manifest["diagnostics"] = {{"metric", spec.metric},
                                   {"residual", residual_summary(residual)},
                                   {"initial_residual", residual_summary(residual0)}};
        break;
      }
    }
    stages.back()["status"] = "ok";
    manifest["status"] = "ok";
    log << "final energy " << io::format_double(manifest["final_energy"].get<double>()) << "  baseline "
        << io::format_double(manifest["baseline_energy"].get<double>()) << "\n";
  } catch (const ConfigError& e) {
    code = kExitConfig;
    manifest["error"] = e.what();
  } catch (const core::DivergenceError& e) {
    code = kExitNumerical;
    manifest["error"] = e.what();
    files.csv("convergence.csv", convergence_table(e.trace()));
  } catch (const Error& e) {
    code = kExitNumerical;
    manifest["error"] = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    code = kExitConfig;
    manifest["error"] = e.what();
  }
  if (code != kExitOk) {
    if (!stages.empty()) stages.back()["status"] = "failed";
    manifest["status"] = "failed";
    manifest["failed_stage"] = stage;
    log << "error in stage '" << stage << "': " << manifest["error"].get<std::string>() << "\n";
  }
  manifest["stages"] = stages;
  manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  return code;
}

}  // namespace ritz::cli
