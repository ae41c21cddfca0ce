#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ritz/metrics/refractive.hpp"
#include "ritz/metrics/strain.hpp"
#include "ritz/metrics/surface.hpp"

using namespace ritz;
using namespace ritz::metrics;
using std::numbers::pi;

namespace {

template <class Surface>
SquareMatrix<double> fd_gram(const Surface& s, std::vector<double> th, double h = 1e-6) {
  const std::size_t k = th.size();
  std::vector<std::vector<double>> cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto a = th, b = th;
    a[j] += h;
    b[j] -= h;
    const auto pa = s.map(std::span<const double>(a));
    const auto pb = s.map(std::span<const double>(b));
    for (std::size_t i = 0; i < pa.size(); ++i) cols[j].push_back((pa[i] - pb[i]) / (2 * h));
  }
  SquareMatrix<double> g(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < cols[a].size(); ++i) g(a, b) += cols[a][i] * cols[b][i];
  return g;
}

double max_rel(const SquareMatrix<double>& a, const SquareMatrix<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      num = std::max(num, std::abs(a(i, j) - b(i, j)));
      den = std::max(den, std::abs(b(i, j)));
    }
  return num / den;
}

Eigen::MatrixXd to_eigen(const SquareMatrix<double>& g) {
  Eigen::MatrixXd m(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) m(i, j) = g(i, j);
  return m;
}

}  // namespace

TEST_CASE("plane and sphere metrics") {
  PlaneMetric plane(PlaneSurface{});
  const auto g = plane.evaluate(std::vector<double>{0.3, -4.0});
  CHECK(g(0, 0) == 1.0);
  CHECK(g(1, 1) == 1.0);
  CHECK(g(0, 1) == 0.0);

  SphereMetric sphere(SphereSurface{});
  const auto s = sphere.evaluate(std::vector<double>{pi / 3, 0.4});
  CHECK(std::abs(s(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(s(1, 1) - 0.75) < 1e-15);
  CHECK(std::abs(s(0, 1)) < 1e-15);
}

TEST_CASE("landscape surface values") {
  for (double y : {-1.0, 0.0, 0.6}) CHECK(landscape_surface(std::vector<double>{0.0, y}, 2.0, 4.0)[2] == 0.0);
  const double e = landscape_surface(std::vector<double>{0.25, 1.0}, 0.25, 2.0)[2];
  const double s = std::sin(2 * pi * 0.25) * std::sin(2 * pi * 0.25 * 1.0);
  CHECK(std::abs(e - 0.25 * s * s) < 1e-15);
  const double e2 = landscape_surface(std::vector<double>{0.3, -0.7}, 0.25, 2.0)[2];
  const double s2 = std::sin(2 * pi * 0.3) * std::sin(2 * pi * 0.3 * -0.7);
  CHECK(std::abs(e2 - 0.25 * s2 * s2) < 1e-15);

  LandscapeMetric flat(LandscapeSurface{0.0, 2.0});
  const auto g = flat.evaluate(std::vector<double>{0.4, 0.9});
  CHECK(g(0, 0) == 1.0);
  CHECK(g(1, 1) == 1.0);
  CHECK(g(0, 1) == 0.0);
}

TEST_CASE("surface metrics are the Gram matrix of the Jacobian") {
  const LandscapeSurface land{0.25, 2.0};
  LandscapeMetric lm(land);
  CHECK(max_rel(lm.evaluate(std::vector<double>{0.3, -0.2}), fd_gram(land, {0.3, -0.2})) < 1e-6);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LandscapeSurface steep{2.0, 4.0};
  LandscapeMetric sm(steep);
  SphereMetric sphere(SphereSurface{});
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> th{u(rng), u(rng)};
    CHECK(max_rel(sm.evaluate(th), fd_gram(steep, th)) < 1e-6);
    const std::vector<double> ph{1.5 + 0.5 * u(rng), 3 * u(rng)};
    CHECK(max_rel(sphere.evaluate(ph), fd_gram(SphereSurface{}, ph)) < 1e-6);
  }
}

TEST_CASE("rigid motions leave the metric unchanged") {
  const double c = std::cos(0.7), s = std::sin(0.7);
  RigidlyMovedSurface<LandscapeSurface> moved{LandscapeSurface{2.0, 4.0}, {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}},
                                              {1.0, -2.0, 0.5}};
  // Second rotation about x to mix all three axes.
  const double c2 = std::cos(-1.1), s2 = std::sin(-1.1);
  const std::array<std::array<double, 3>, 3> rx{{{1, 0, 0}, {0, c2, -s2}, {0, s2, c2}}};
  std::array<std::array<double, 3>, 3> q{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) q[i][j] += rx[i][k] * moved.rotation[k][j];
  moved.rotation = q;

  SurfaceMetric<RigidlyMovedSurface<LandscapeSurface>> g1(moved);
  LandscapeMetric g0(LandscapeSurface{2.0, 4.0});
  for (const std::vector<double>& th : {std::vector<double>{0.1, 0.2}, {-0.7, 0.9}, {0.45, -0.33}}) {
    const auto a = g0.evaluate(th);
    const auto b = g1.evaluate(th);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(a(i, j) - b(i, j)) < 1e-12 * std::max(1.0, std::abs(a(i, j))));
  }
}

TEST_CASE("helix axis") {
  const auto top = helix_axis(1.0, 0.75);
  CHECK(std::abs(top[0]) < 1e-16);
  CHECK(std::abs(top[1]) < 1e-16);
  CHECK(top[2] == 1.0);
  const auto bottom = helix_axis(-1.0, 0.75);
  CHECK(std::abs(bottom[0]) < 1e-16);
  CHECK(bottom[2] == -1.0);
  const auto mid = helix_axis(0.0, 0.75);
  CHECK(mid == Point3{0.75, 0.0, 0.0});
}

TEST_CASE("distance to the helix axis") {
  const RefractiveField field;
  CHECK(field.distance_to_axis({0, 0, 1}).distance < 1e-12);
  for (double s : {-0.9, -0.31, 0.0, 0.52, 0.77}) CHECK(field.distance_to_axis(helix_axis(s, 0.75)).distance < 1e-6);

  // Brute force over 1e5 samples.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> points{{0, 0, 0}};
  for (int i = 0; i < 10; ++i) points.push_back({u(rng), u(rng), u(rng)});
  for (const Point3& x : points) {
    double best = 1e300;
    for (int i = 0; i <= 100000; ++i) {
      const auto h = helix_axis(-1.0 + 2.0 * i / 100000, 0.75);
      best = std::min(best, std::hypot(x[0] - h[0], x[1] - h[1], x[2] - h[2]));
    }
    CHECK(field.distance_to_axis(x).distance == doctest::Approx(best).epsilon(1e-7));
    CHECK(field.distance_to_axis(x).distance <= best + 1e-12);
  }
}

TEST_CASE("refractive index") {
  const RefractiveField field;
  CHECK(field.refractive_index({0.75, 0, 0}, IndexMode::kSharp) == 1.0);
  CHECK(field.refractive_index({0, 0, 0}, IndexMode::kSharp) == 20.0);

  // A point at distance exactly ε from the axis sample at s = 0, along the radial direction.
  const Point3 edge{0.75 + 0.2, 0.0, 0.0};
  const double d = field.distance_to_axis(edge).distance;
  const double n = field.refractive_index(edge, IndexMode::kSmooth);
  const double expect = 20.0 + (1.0 - 20.0) * 0.5 * (1 + std::tanh((0.2 - d) / 0.1));
  CHECK(std::abs(n - expect) < 1e-12);
  CHECK(std::abs(d - 0.2) < 1e-3);
  CHECK(std::abs(n - 10.5) < 0.2);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  RefractiveMetric metric(field);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const double ns = field.refractive_index({x[0], x[1], x[2]}, IndexMode::kSmooth);
    CHECK((ns >= 1.0 && ns <= 20.0));
    const auto g = metric.evaluate(x);
    CHECK(g(0, 0) > 0.0);
    CHECK(g(0, 0) == g(1, 1));
    CHECK(g(0, 1) == 0.0);
  }
  RefractiveMetric sharp(field, IndexMode::kSharp);
  CHECK(sharp.evaluate(std::vector<double>{0.75, 0, 0})(0, 0) == 1.0);
  CHECK(sharp.evaluate(std::vector<double>{0, 0, 0})(2, 2) == 400.0);
  // The smoothed field reaches the background value far from the tube.
  CHECK(std::abs(metric.evaluate(std::vector<double>{0, 0, 0})(0, 0) - 400.0) < 400.0 * 1e-4);
}

TEST_CASE("smooth index is monotone in the distance and tends to the sharp field") {
  RefractiveParams p;
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const Point3 x{0.75 + 0.01 * i, 0.0, 0.0};
    const double n = RefractiveField(p).refractive_index(x, IndexMode::kSmooth);
    CHECK(n >= prev);
    prev = n;
  }
  for (double tau : {0.05, 0.01, 0.002}) {
    p.tau = tau;
    const RefractiveField f(p);
    const Point3 a{0.75 + 0.15, 0, 0}, b{0.75 + 0.25, 0, 0};
    const double da = f.distance_to_axis(a).distance, db = f.distance_to_axis(b).distance;
    const double inside = f.refractive_index(a, IndexMode::kSmooth);
    const double outside = f.refractive_index(b, IndexMode::kSmooth);
    CAPTURE(tau);
    CHECK(f.refractive_index(a, IndexMode::kSharp) == 1.0);
    CHECK(f.refractive_index(b, IndexMode::kSharp) == 20.0);
    CHECK(std::abs(inside - 1.0) <= 19.0 * std::exp(-(0.2 - da) / tau));
    CHECK(std::abs(outside - 20.0) <= 19.0 * std::exp(-(db - 0.2) / tau));
  }
}

TEST_CASE("smooth index gradient matches finite differences") {
  RefractiveMetric metric(RefractiveField{});
  const std::vector<double> x{0.6, 0.3, -0.1};
  const std::vector<double> v{0.2, -1.0, 0.7};
  ad::Tape tape;
  const auto xl = tape.leaves(x);
  const auto vl = tape.leaves(v);
  const ad::Var q = metric.quadratic_form(std::span<const ad::Var>(xl), std::span<const ad::Var>(vl));
  const auto g = ad::gradient(tape, q, xl);
  for (std::size_t i = 0; i < 3; ++i) {
    auto a = x, b = x;
    a[i] += 1e-6;
    b[i] -= 1e-6;
    const double n = (metric.quadratic_form(a, v) - metric.quadratic_form(b, v)) / 2e-6;
    CHECK(std::abs(g[i] - n) <= 1e-5 * std::max(std::abs(n), 1.0));
  }
}

TEST_CASE("strain mixed derivative and metric for a one-parameter field") {
  const PolynomialAmplitude one{1};
  const std::vector<double> theta{1.3};
  const auto d0 = strain_mixed_derivative(one, std::span<const double>(theta), 0.0);
  CHECK(std::abs(d0[0] - pi) < 1e-15);
  const auto d = strain_mixed_derivative(one, std::span<const double>(theta), 0.3);
  CHECK(std::abs(d[0] - pi * std::cos(0.3 * pi)) < 1e-14);

  PolynomialStrainMetric metric(one, 100);
  const double g11 = metric.evaluate(theta)(0, 0);
  CHECK(std::abs(g11 - pi * pi / 2) < 1e-4);
  CHECK(g11 == doctest::Approx(4.9348).epsilon(1e-4));
}

TEST_CASE("strain metric of a network amplitude") {
  const nn::Architecture arch = nn::Architecture::mlp(1, 1, {10, 10});
  const auto p = nn::init_params(arch, 4).flatten();
  const NetworkAmplitude amp{arch};

  // Mixed derivative against nested central differences.
  {
    auto u = [&](const std::vector<double>& th, double x) {
      return displacement(amp, x, std::span<const double>(th));
    };
    for (double x : {0.1, 0.45, 0.8}) {
      const auto mixed = strain_mixed_derivative(amp, std::span<const double>(p), x);
      for (std::size_t k = 0; k < p.size(); k += 11) {
        const double h = 1e-4;
        auto tp = p, tm = p;
        tp[k] += h;
        tm[k] -= h;
        const double n = (u(tp, x + h) - u(tp, x - h) - u(tm, x + h) + u(tm, x - h)) / (4 * h * h);
        CHECK(std::abs(mixed[k] - n) <= 1e-3 * std::max(std::abs(n), 1e-2));
      }
    }
  }

  // Zero rows for parameters that cannot act: freeze the first hidden layer
  // to zero output so the weights of layer 2 and 3 that read it vanish.
  {
    auto q = p;
    const auto& l0 = arch.layers()[0];
    for (std::size_t i = 0; i < l0.out; ++i) {
      q[l0.weight_offset + i] = 0.0;
      q[l0.bias_offset + i] = 0.0;
    }
    const auto mixed = strain_mixed_derivative(amp, std::span<const double>(q), 0.4);
    const auto& l1 = arch.layers()[1];
    for (std::size_t i = 0; i < l1.in * l1.out; ++i) CHECK(mixed[l1.weight_offset + i] == 0.0);
  }

  NetworkStrainMetric metric(amp, 100, StrainKernel::kGeneric);
  const auto g = metric.evaluate(p);
  CHECK(g.size() == 140);
  const Eigen::MatrixXd m = to_eigen(g);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  CHECK(lu.rank() <= 100);

  // v·g·v three ways: the Gram matrix, the nested forward form, the fused kernel.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::vector<double> v(140);
  for (double& vi : v) vi = n01(rng);
  double vgv = 0.0;
  for (std::size_t a = 0; a < 140; ++a)
    for (std::size_t b = 0; b < 140; ++b) vgv += v[a] * g(a, b) * v[b];
  const double nested = metric.quadratic_form(p, v);
  NetworkStrainMetric fused(amp, 100, StrainKernel::kFused);
  const double kern = fused.quadratic_form(p, v);
  CHECK(std::abs(nested - vgv) < 1e-10 * std::abs(vgv));
  CHECK(std::abs(kern - vgv) < 1e-10 * std::abs(vgv));
}

TEST_CASE("fused strain kernel gradient matches the nested graph") {
  const nn::Architecture arch = nn::Architecture::mlp(1, 1, {6, 6});
  const auto p = nn::init_params(arch, 9).flatten();
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(1.0 + i);

  auto grad_of = [&](StrainKernel k) {
    NetworkStrainMetric m(NetworkAmplitude{arch}, 40, k);
    ad::Tape tape;
    const auto tl = tape.leaves(p);
    const auto vl = tape.leaves(v);
    const ad::Var q = m.quadratic_form(std::span<const ad::Var>(tl), std::span<const ad::Var>(vl));
    std::vector<ad::Var> all = tl;
    all.insert(all.end(), vl.begin(), vl.end());
    return std::make_pair(q.value(), ad::gradient(tape, q, all));
  };
  const auto [qa, ga] = grad_of(StrainKernel::kFused);
  const auto [qb, gb] = grad_of(StrainKernel::kGeneric);
  CHECK(std::abs(qa - qb) < 1e-12 * std::abs(qb));
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    err = std::max(err, std::abs(ga[i] - gb[i]));
    scale = std::max(scale, std::abs(gb[i]));
  }
  CHECK(err < 1e-10 * scale);
}

TEST_CASE("displacement vanishes at both ends") {
  const nn::Architecture arch = nn::Architecture::mlp(1, 1, {10, 10});
  const NetworkAmplitude amp{arch};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = nn::init_params(arch, seed).flatten();
    CHECK(displacement(amp, 0.0, std::span<const double>(p)) == 0.0);
    CHECK(displacement(amp, 1.0, std::span<const double>(p)) == 0.0);
  }
}

TEST_CASE("constant metrics") {
  const auto d = ConstantMetric::diagonal({4.0, 1.0});
  const std::vector<double> th{0.0, 0.0}, v{1.0, 1.0};
  CHECK(d.quadratic_form(th, v) == 5.0);
  CHECK(d.is_constant());
  CHECK_THROWS_AS(d.evaluate(std::vector<double>{1.0}), ConfigError);
}
