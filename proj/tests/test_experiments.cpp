#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "ritz/experiments/experiments.hpp"

using namespace ritz;
using namespace ritz::experiments;
using core::PathModel;
using core::QuadGrid;
using nn::Architecture;
using std::numbers::pi;

namespace {

PathModel linear_path(std::vector<double> a, std::vector<double> b) {
  const Architecture arch = Architecture::mlp(1, a.size(), {3});
  return PathModel(std::move(a), std::move(b), arch, arch.make_layout());
}

}  // namespace

TEST_CASE("strain energy closed forms") {
  const metrics::PolynomialAmplitude one{1};
  const QuadGrid x(100);
  const std::vector<double> a{1.0}, b{2.0}, z{0.0};
  const double u = metrics::strain_energy(one, std::span<const double>(a), x);
  CHECK(std::abs(u - pi * pi / 4) < 1e-3);
  CHECK(u == doctest::Approx(2.4674).epsilon(1e-3));
  CHECK(metrics::strain_energy(one, std::span<const double>(z), x) == 0.0);
  CHECK(metrics::strain_energy(one, std::span<const double>(b), x) == doctest::Approx(4 * u).epsilon(1e-14));
}

TEST_CASE("power telescoping closed forms") {
  const metrics::PolynomialAmplitude one{1};
  const QuadGrid x(100);

  const auto r = power_telescoping_check(one, linear_path({0.0}, {1.0}), x, 1001);
  CHECK(std::abs(r.lhs - pi * pi / 4) < 1e-3);
  CHECK(std::abs(r.rhs - pi * pi / 4) < 1e-3);
  CHECK(r.gap < 1e-6);

  const auto s = power_telescoping_check(one, linear_path({0.7}, {0.7}), x, 101);
  CHECK(s.lhs == 0.0);
  CHECK(s.rhs == 0.0);

  // A curved path through a two-term amplitude still telescopes.
  const metrics::PolynomialAmplitude two{2};
  const auto curved = PathModel::initialized({0.2, -0.4}, {1.1, 0.3}, Architecture::mlp(1, 2, {5}), 3);
  CHECK(power_telescoping_check(two, curved, x, 1001).gap < 1e-5);
}

TEST_CASE("bar profiles") {
  CHECK(bar_profile("sin_pi").u(0.5) == doctest::Approx(1.0));
  CHECK(bar_profile("minus_two_x_sin_pi").u(0.5) == doctest::Approx(-1.0));
  CHECK(bar_profile("sin_three_pi").u(0.5) == doctest::Approx(-1.0));
  CHECK(bar_profile("zero").u(0.3) == 0.0);
  CHECK(bar_profile_names().size() == 4);
  CHECK_THROWS_AS(bar_profile("cosine"), ConfigError);
}

TEST_CASE("endpoint regression") {
  const Architecture arch = Architecture::mlp(1, 1, {10, 10});
  const QuadGrid x(100);
  FitConfig cfg;

  const FitResult z = fit_endpoint(arch, bar_profile("zero"), x, cfg, 0);
  CHECK(z.mse < 1e-7);

  const FitResult s = fit_endpoint(arch, bar_profile("sin_pi"), x, cfg, 1);
  CHECK(s.mse < 1e-5);
  CHECK(s.sup_error < 5e-3);
  CHECK(s.theta.size() == 140);

  const FitResult m = fit_endpoint(arch, bar_profile("minus_two_x_sin_pi"), x, cfg, 2);
  CHECK(m.mse < 1e-5);
  CHECK(m.sup_error < 5e-3);

  FitConfig starved = cfg;
  starved.max_epochs = 5;
  CHECK_THROWS_AS(fit_endpoint(arch, bar_profile("sin_pi"), x, starved, 1), ConvergenceError);

  const BarProfile bad{"cosine", [](double xx) { return std::cos(xx); }};
  CHECK_THROWS_AS(fit_endpoint(arch, bad, x, cfg, 1), ConfigError);
}

TEST_CASE("flat landscape reduces to the straight diagonal") {
  LandscapeConfig cfg;
  cfg.height = 0.0;
  cfg.train.epochs = 1500;
  std::vector<std::string> stages;
  Hooks hooks;
  hooks.on_stage = [&](const std::string& s) { stages.push_back(s); };
  const LandscapeRun r = run_landscape(cfg, hooks);
  CHECK(std::abs(r.path.trace.final_energy - 4.0) < 1e-2);
  CHECK(r.path.baseline_energy == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(r.max_elevation == 0.0);
  CHECK(stages == std::vector<std::string>{"train", "validate"});
}

TEST_CASE("mellow landscape run outputs") {
  LandscapeConfig cfg;
  cfg.train.epochs = 400;
  const LandscapeRun r = run_landscape(cfg);
  CHECK(r.path.trace.size() == 400);
  CHECK(r.path.trace.final_energy < r.path.trace.energy.front());
  CHECK(r.embedded.size() == 250);
  const metrics::LandscapeSurface surf{cfg.height, cfg.frequency};
  const QuadGrid grid;
  for (std::size_t i = 0; i < grid.size(); i += 17) {
    const auto p = core::path_point(r.path.model, grid.node(i)).position;
    CHECK(r.embedded[i][0] == p[0]);
    CHECK(r.embedded[i][2] == surf.elevation(p[0], p[1]));
  }
  CHECK(r.residual.t.size() == 248);
  CHECK(r.baseline_max_elevation == doctest::Approx(max_path_elevation(linear_path({-1, -1}, {1, 1}), surf, 2001)));
}

TEST_CASE("waveguide configuration") {
  WaveguideConfig cfg;
  const Architecture f = waveguide_architecture(cfg, 4);
  REQUIRE(f.embedding());
  CHECK(f.embedding()->frequencies.size() == 15);
  CHECK(f.embedding()->seed == 4);
  cfg.network = NetworkKind::kSiren;
  CHECK(waveguide_architecture(cfg, 0).activation() == nn::Activation::kSine);
  cfg.network = NetworkKind::kMlp;
  CHECK(waveguide_architecture(cfg, 0).hidden_widths() == std::vector<std::size_t>{15, 15});
  CHECK(network_kind_from_string("fourier") == NetworkKind::kFourier);
  CHECK(to_string(NetworkKind::kSiren) == "siren");
  CHECK_THROWS_AS(network_kind_from_string("resnet"), ConfigError);
  cfg.network = NetworkKind::kFourier;
  cfg.fourier_features = 7;
  CHECK_THROWS_AS(waveguide_architecture(cfg, 0), ConfigError);
}

TEST_CASE("uniform medium gives the straight line") {
  WaveguideConfig cfg;
  cfg.field.n1 = 1.0;
  cfg.network = NetworkKind::kMlp;
  cfg.train.epochs = 1000;
  const WaveguideRun r = run_waveguide(cfg);
  CHECK(r.path.baseline_energy == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(r.path.trace.final_energy - 2.0) < 1e-2);
  const auto a = core::path_point(r.path.model, 0.0).position;
  const auto b = core::path_point(r.path.model, 1.0).position;
  CHECK(a == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(b == std::vector<double>{0.0, 0.0, -1.0});
  CHECK(r.stagnated);
}

TEST_CASE("identity bar transport and snapshots") {
  BarConfig cfg;
  cfg.u1 = cfg.u0;
  cfg.displacement_hidden = {4, 4};
  cfg.path_hidden = {6};
  cfg.x_points = 40;
  cfg.train.epochs = 150;
  cfg.snapshot_times = 5;
  cfg.snapshot_points = 21;
  std::vector<std::string> stages;
  Hooks hooks;
  hooks.on_stage = [&](const std::string& s) { stages.push_back(s); };
  const BarRun r = run_bar(cfg, hooks);
  CHECK(stages == std::vector<std::string>{"fit", "gradient_check", "train", "validate"});
  CHECK(r.fit0.theta == r.fit1.theta);
  CHECK(r.path.baseline_energy == 0.0);
  CHECK(r.path.trace.final_energy >= 0.0);
  CHECK(r.path.trace.final_energy < 1e-3);
  CHECK(r.gradient.max_rel_error < 1e-4);
  CHECK(r.telescoping.gap < 1e-3);
  REQUIRE(r.snapshots.size() == 5);
  for (const Snapshot& s : r.snapshots) {
    CHECK(s.u.front() == 0.0);
    CHECK(s.u.back() == 0.0);
  }
}

TEST_CASE("bar runs are reproducible") {
  BarConfig cfg;
  cfg.displacement_hidden = {3};
  cfg.path_hidden = {4};
  cfg.x_points = 30;
  cfg.train.epochs = 40;
  cfg.fit.tolerance = 1.0;
  cfg.fit.max_epochs = 300;
  const BarRun a = run_bar(cfg);
  const BarRun b = run_bar(cfg);
  CHECK(a.path.trace.energy == b.path.trace.energy);
  CHECK(a.path.trace.final_energy == b.path.trace.final_energy);
  CHECK(a.path.trace.final_energy > 0.0);
}
