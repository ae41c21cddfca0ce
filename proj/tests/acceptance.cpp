// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ritz/core/solver.hpp"
#include "ritz/experiments/experiments.hpp"
#include "ritz/io/csv.hpp"
#include "ritz/metrics/refractive.hpp"
#include "ritz/metrics/strain.hpp"
#include "ritz/metrics/surface.hpp"
#include "ritz/oracle/oracle.hpp"

using namespace ritz;
using core::PathModel;
using core::QuadGrid;
using nn::Architecture;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void note(const std::string& text) {
  std::printf("  note: %s\n", text.c_str());
  std::fflush(stdout);
}

struct FlatOutcome {
  std::vector<double> energies;
  double final_energy = 0.0;
  double rms = 0.0;
  double seconds = 0.0;
};

FlatOutcome flat_run() {
  const auto t0 = Clock::now();
  const auto flat = metrics::ConstantMetric::identity(2);
  core::TrainConfig cfg;
  cfg.epochs = 5000;
  const auto r = core::train(PathModel::initialized({0, 0}, {1, 1}, Architecture::mlp(1, 2, {25, 25}), cfg.seed),
                             flat, cfg);
  FlatOutcome out;
  out.energies = r.trace.energy;
  out.final_energy = r.trace.final_energy;
  out.rms = oracle::el_residual(r.model, flat, QuadGrid(cfg.grid_points)).rms;
  out.seconds = seconds_since(t0);
  return out;
}

struct SphereOutcome {
  std::vector<double> energies;
  double final_energy = 0.0;
  double shooting_energy = 0.0;
  double gap = 0.0;
  double seconds = 0.0;
};

SphereOutcome sphere_run() {
  const auto t0 = Clock::now();
  const metrics::SphereMetric sphere{metrics::SphereSurface{}};
  const std::vector<double> a{pi / 2, 0}, b{pi / 2, pi / 2};
  core::TrainConfig cfg;
  const auto r = core::train(PathModel::initialized(a, b, Architecture::mlp(1, 2, {25, 25}), cfg.seed), sphere, cfg);
  const auto sh = oracle::shoot(sphere, a, b, std::vector<double>{0.0, pi / 2});
  std::vector<double> ts;
  std::vector<std::vector<double>> path;
  for (int i = 0; i <= 1000; ++i) {
    ts.push_back(i / 1000.0);
    path.push_back(core::path_point(r.model, ts.back()).position);
  }
  SphereOutcome out;
  out.energies = r.trace.energy;
  out.final_energy = r.trace.final_energy;
  out.shooting_energy = sh.energy;
  out.gap = oracle::sup_gap(sh.trajectory, ts, path);
  out.seconds = seconds_since(t0);
  return out;
}

double gradient_error(const std::string& name, const PathModel& model, const metrics::MetricField& metric,
                      const QuadGrid& grid) {
  const auto c = oracle::gradient_check(model, metric, grid, 10, 0);
  note(name + " max relative error " + num(c.max_rel_error));
  return c.max_rel_error;
}

}  // namespace

int main() {
  // 1. flat space
  const FlatOutcome flat = flat_run();
  report(1, std::abs(flat.final_energy - 1.0) < 1e-3 && flat.rms < 1e-3 && flat.seconds < 60.0,
         "flat: energy " + io::format_double(flat.final_energy) + ", EL rms " + num(flat.rms) + ", " +
             num(flat.seconds) + " s");

  // 2. sphere equator against the closed form and shooting
  const SphereOutcome sph = sphere_run();
  const double exact = 0.5 * (pi / 2) * (pi / 2);
  const double rel_exact = std::abs(sph.final_energy - exact) / exact;
  const double rel_shoot = std::abs(sph.final_energy - sph.shooting_energy) / sph.shooting_energy;
  report(2, rel_exact < 1e-2 && rel_shoot < 1e-2 && sph.gap < 2e-2 && sph.seconds < 180.0,
         "sphere: energy " + io::format_double(sph.final_energy) + ", shooting " +
             io::format_double(sph.shooting_energy) + ", rel err " + num(rel_exact) + " / " + num(rel_shoot) +
             ", sup gap " + num(sph.gap) + ", " + num(sph.seconds) + " s");

  // 3. gradient integrity per metric family
  {
    const auto t0 = Clock::now();
    const QuadGrid grid;
    double worst = 0.0;
    const metrics::LandscapeMetric land(metrics::LandscapeSurface{2.0, 4.0});
    worst = std::max(worst, gradient_error("landscape", PathModel::initialized({-1, -1}, {1, 1},
                                                             Architecture::mlp(1, 2, {25, 25}), 0), land, grid));
    const metrics::SphereMetric sphere{metrics::SphereSurface{}};
    worst = std::max(worst, gradient_error("sphere", PathModel::initialized({1.0, 0.2}, {2.0, 1.4},
                                                          Architecture::mlp(1, 2, {25, 25}), 0), sphere, grid));
    const experiments::WaveguideConfig wcfg;
    const metrics::RefractiveMetric wave(metrics::RefractiveField(wcfg.field), metrics::IndexMode::kSmooth);
    worst = std::max(worst, gradient_error("refractive smooth",
                                           PathModel::initialized(wcfg.theta0, wcfg.theta1,
                                                                  experiments::waveguide_architecture(wcfg, 0), 0),
                                           wave, grid));
    const experiments::BarConfig bcfg;
    const Architecture disp = experiments::bar_displacement_architecture(bcfg);
    const QuadGrid x(bcfg.x_points);
    const auto fit0 = experiments::fit_endpoint(disp, experiments::bar_profile(bcfg.u0), x, bcfg.fit, 0);
    const auto fit1 = experiments::fit_endpoint(disp, experiments::bar_profile(bcfg.u1), x, bcfg.fit, 0);
    const metrics::NetworkStrainMetric strain(metrics::NetworkAmplitude{disp}, bcfg.x_points);
    worst = std::max(worst, gradient_error("strain", PathModel::initialized(fit0.theta, fit1.theta,
                                                          Architecture::mlp(1, disp.param_count(), bcfg.path_hidden), 0),
                                           strain, grid));
    const double s = seconds_since(t0);
    report(3, worst < 1e-4 && s < 120.0, "gradient: worst relative error " + num(worst) + ", " + num(s) + " s");
  }

  // 4. landscape
  {
    experiments::LandscapeConfig rugged;
    rugged.height = 2.0;
    rugged.frequency = 4.0;
    auto t0 = Clock::now();
    const auto r = experiments::run_landscape(rugged);
    const double s1 = seconds_since(t0);
    experiments::LandscapeConfig mellow;
    t0 = Clock::now();
    const auto m = experiments::run_landscape(mellow);
    const double s2 = seconds_since(t0);
    const double rel = std::abs(m.path.trace.final_energy - m.path.baseline_energy) / m.path.baseline_energy;
    report(4, r.max_elevation < r.baseline_max_elevation && rel < 0.15 && s1 < 300.0 && s2 < 300.0,
           "landscape: h=2 f=4 max elevation " + num(r.max_elevation) + " vs straight " +
               num(r.baseline_max_elevation) + " (" + num(s1) + " s); h=0.25 f=2 energy " +
               num(m.path.trace.final_energy) + " vs straight " + num(m.path.baseline_energy) + ", rel " + num(rel) +
               " (" + num(s2) + " s)");
  }

  // 5. waveguide escape with Fourier features
  {
    const auto t0 = Clock::now();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      experiments::WaveguideConfig cfg;
      cfg.train.seed = seed;
      const auto r = experiments::run_waveguide(cfg);
      const double ratio = r.path.trace.final_energy / r.path.baseline_energy;
      note("fourier seed " + std::to_string(seed) + " energy ratio " + num(ratio));
      best_ratio = std::min(best_ratio, ratio);
    }
    const double s = seconds_since(t0);
    report(5, best_ratio < 0.5 && s < 900.0,
           "waveguide: best energy ratio " + num(best_ratio) + " over 5 seeds, " + num(s) + " s");
    experiments::WaveguideConfig mlp;
    mlp.network = experiments::NetworkKind::kMlp;
    const auto r = experiments::run_waveguide(mlp);
    note("plain MLP energy ratio " + num(r.path.trace.final_energy / r.path.baseline_energy) +
         (r.stagnated ? ", stagnated near the straight line" : ", left the straight line") + " (not gated)");
  }

  // 6. elastic bar
  {
    const auto t0 = Clock::now();
    auto bar = [](const std::string& u1) {
      experiments::BarConfig cfg;
      cfg.u1 = u1;
      return experiments::run_bar(cfg);
    };
    const auto a = bar("minus_two_x_sin_pi");
    const auto b = bar("sin_three_pi");
    const auto id = bar("sin_pi");
    const double gap = std::max({a.telescoping.gap, b.telescoping.gap, id.telescoping.gap});
    const double s = seconds_since(t0);
    report(6,
           b.path.trace.final_energy > a.path.trace.final_energy && id.path.trace.final_energy < 1e-3 && gap < 1e-3 &&
               s < 600.0,
           "bar: E(sin 3pi x) " + num(b.path.trace.final_energy) + " > E(-2x sin pi x) " +
               num(a.path.trace.final_energy) + ", identity " + num(id.path.trace.final_energy) +
               ", telescoping gap " + num(gap) + ", " + num(s) + " s");
  }

  // 7. Christoffel contraction conventions
  {
    const auto t0 = Clock::now();
    const metrics::SphereMetric sphere{metrics::SphereSurface{}};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> polar(0.1, pi - 0.1), azimuth(-pi, pi), vel(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> th{polar(rng), azimuth(rng)}, v{vel(rng), vel(rng)};
      const auto p = oracle::christoffel(sphere, th).contract(v);
      const auto q = oracle::standard_contraction(sphere, th, v);
      for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, std::abs(p[k] - q[k]));
    }
    const double s = seconds_since(t0);
    report(7, worst < 1e-10 && s < 1.0, "christoffel: max abs error " + num(worst) + ", " + num(s) + " s");
  }

  // 8. determinism of criteria 1 and 2
  {
    const FlatOutcome f2 = flat_run();
    const SphereOutcome s2 = sphere_run();
    const bool same = f2.energies == flat.energies && s2.energies == sph.energies &&
                      f2.final_energy == flat.final_energy && s2.final_energy == sph.final_energy;
    report(8, same, std::string("determinism: repeated flat and sphere traces ") +
                        (same ? "bit-identical" : "differ"));
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
