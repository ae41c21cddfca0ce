#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ritz/ad/autodiff.hpp"

using namespace ritz;
using ad::Dual;
using ad::Tape;
using ad::Var;

namespace {

double central(const std::function<double(std::vector<double>)>& f, std::vector<double> x, std::size_t i,
               double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

}  // namespace

TEST_CASE("input derivative of closed forms") {
  auto [v0, d0] = ad::eval_with_input_derivative([](auto t) { return tanh(t); }, 0.0);
  CHECK(v0 == 0.0);
  CHECK(d0 == 1.0);

  auto [v1, d1] = ad::eval_with_input_derivative([](auto t) { return t * t; }, 3.0);
  CHECK(v1 == 9.0);
  CHECK(d1 == 6.0);

  auto [v2, d2] = ad::eval_with_input_derivative([](auto t) { return sin(2.0 * t); }, 0.5);
  CHECK(v2 == doctest::Approx(0.841471).epsilon(1e-6));
  CHECK(std::abs(d2 - 2 * std::cos(1.0)) < 1e-15);
}

TEST_CASE("dual derivatives match a battery of symbolic derivatives") {
  struct Case {
    std::function<Dual<double>(Dual<double>)> f;
    std::function<double(double)> df;
  };
  const std::vector<Case> battery = {
      {[](Dual<double> t) { return sin(t) * cos(t); }, [](double t) { return std::cos(2 * t); }},
      {[](Dual<double> t) { return exp(tanh(t)); },
       [](double t) { return std::exp(std::tanh(t)) * (1 - std::tanh(t) * std::tanh(t)); }},
      {[](Dual<double> t) { return sqrt(1.0 + t * t); }, [](double t) { return t / std::sqrt(1 + t * t); }},
      {[](Dual<double> t) { return pow(t, 3.5); }, [](double t) { return 3.5 * std::pow(t, 2.5); }},
      {[](Dual<double> t) { return 1.0 / (1.0 + t); }, [](double t) { return -1.0 / ((1 + t) * (1 + t)); }},
      {[](Dual<double> t) { return sin(t * t); }, [](double t) { return 2 * t * std::cos(t * t); }},
      {[](Dual<double> t) { return exp(-t) * sin(3.0 * t); },
       [](double t) { return std::exp(-t) * (3 * std::cos(3 * t) - std::sin(3 * t)); }},
      {[](Dual<double> t) { return tanh(2.0 * t + 0.5); },
       [](double t) { return 2 * (1 - std::pow(std::tanh(2 * t + 0.5), 2)); }},
      {[](Dual<double> t) { return cos(sqrt(t)); }, [](double t) { return -std::sin(std::sqrt(t)) / (2 * std::sqrt(t)); }},
      {[](Dual<double> t) { return (t - 1.0) / (t * t + 2.0); },
       [](double t) { return ((t * t + 2) - (t - 1) * 2 * t) / std::pow(t * t + 2, 2); }},
  };
  for (double t : {0.3, 0.7, 1.9}) {
    for (std::size_t i = 0; i < battery.size(); ++i) {
      CAPTURE(i);
      CAPTURE(t);
      const Dual<double> out = battery[i].f(Dual<double>(t, 1.0));
      CHECK(std::abs(out.deriv - battery[i].df(t)) < 1e-12);
    }
  }
}

TEST_CASE("domain errors for sqrt and division") {
  CHECK_THROWS_AS(ad::eval_with_input_derivative([](auto t) { return sqrt(t - 1.0); }, 0.0), DomainError);
  Tape tape;
  const Var x = tape.leaf(0.0);
  CHECK_THROWS_AS(Var(1.0) / x, DomainError);
  CHECK_THROWS_AS(sqrt(x), DomainError);
  CHECK_THROWS_AS(reciprocal(x), DomainError);
}

TEST_CASE("reverse gradients of small expressions") {
  const std::vector<double> x{3.0};
  auto r = ad::value_and_gradient([](std::span<const Var> p) { return p[0] * p[0]; }, x);
  CHECK(r.value == 9.0);
  CHECK(r.gradient == std::vector<double>{6.0});

  const std::vector<double> w{2.0, 5.0};
  auto p = ad::value_and_gradient([](std::span<const Var> v) { return v[0] * v[1]; }, w);
  CHECK(p.gradient == std::vector<double>{5.0, 2.0});

  const std::vector<double> w2{0.1, -0.3};
  auto f = [](std::span<const Var> v) {
    const Var a = tanh(v[0]);
    const Var b = tanh(v[1]);
    return a * a + b * b;
  };
  auto g = ad::value_and_gradient(f, w2);
  auto fd = [](std::vector<double> v) { return std::pow(std::tanh(v[0]), 2) + std::pow(std::tanh(v[1]), 2); };
  for (std::size_t i = 0; i < 2; ++i) {
    const double n = central(fd, w2, i);
    CHECK(std::abs(g.gradient[i] - n) / std::abs(n) < 1e-6);
  }
}

TEST_CASE("unused parameters get exactly zero") {
  const std::vector<double> w{0.4, 1.3, -0.2};
  auto g = ad::value_and_gradient([](std::span<const Var> v) { return sin(v[0]) * exp(v[2]); }, w);
  CHECK(g.gradient[1] == 0.0);
  CHECK(g.gradient[0] != 0.0);
}

TEST_CASE("non-finite node is reported with its kind") {
  Tape tape;
  const Var x = tape.leaf(800.0);
  const Var y = exp(x) * x;
  try {
    ad::gradient(tape, y, std::vector<Var>{x});
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("exp") != std::string::npos);
  }
}

TEST_CASE("mixed gradients through input derivatives") {
  // d/dw of ∂/∂t sin(wt) = cos(wt) − wt sin(wt)
  const std::vector<double> w{2.0};
  auto a = ad::mixed_gradient([](const Dual<Var>& t, std::span<const Var> p) { return sin(Dual<Var>(p[0], 0.0) * t).deriv; },
                              w, 0.5);
  CHECK(std::abs(a.gradient[0] - (std::cos(1.0) - std::sin(1.0))) < 1e-14);
  CHECK(a.gradient[0] == doctest::Approx(-0.301169).epsilon(1e-6));

  for (double t : {0.0, 0.4, 2.5}) {
    auto b = ad::mixed_gradient([](const Dual<Var>& tt, std::span<const Var> p) { return (Dual<Var>(p[0], 0.0) * tt).deriv; },
                                std::vector<double>{1.7}, t);
    CHECK(b.gradient[0] == 1.0);
  }

  // (∂/∂t w²t²)² = 4w⁴t², derivative 16w³t² = 16 at (1, 1)
  auto c = ad::mixed_gradient(
      [](const Dual<Var>& t, std::span<const Var> p) {
        const Dual<Var> wd(p[0], 0.0);
        const Var d = (wd * wd * t * t).deriv;
        return d * d;
      },
      std::vector<double>{1.0}, 1.0);
  CHECK(std::abs(c.gradient[0] - 16.0) < 1e-12);
  auto h = [](std::vector<double> v) { return std::pow(2 * v[0] * v[0], 2); };
  CHECK(std::abs(central(h, {1.0}, 0) - 16.0) < 1e-6);
}

TEST_CASE("nested builders stage operands in order") {
  Tape tape;
  const std::vector<Var> x = tape.leaves(std::vector<double>{1.0, 2.0, 3.0});
  Tape::Builder outer;
  outer.add(x[0], 2.0);
  Tape::Builder inner;
  inner.add(x[1], 1.0);
  inner.add(x[2], 1.0);
  const Var s = inner.finish(x[1].value() + x[2].value());
  outer.add(s, 3.0);
  const Var out = outer.finish(2.0 * 1.0 + 3.0 * 5.0);
  const std::vector<double> g = ad::gradient(tape, out, x);
  CHECK(g == std::vector<double>{2.0, 3.0, 3.0});
}

TEST_CASE("random expressions against finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::uniform_int_distribution<int> op(0, 8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ops(6);
    for (int& o : ops) o = op(rng);
    const std::vector<double> c{u(rng), u(rng), u(rng)};
    // Chain of unary and binary steps mixing the three parameters.
    auto build = [&](auto x0, auto x1, auto x2) {
      std::array<decltype(x0), 3> xs{x0, x1, x2};
      decltype(x0) acc = x0;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const auto& b = xs[k % 3];
        switch (ops[k]) {
          case 0: acc = acc + b; break;
          case 1: acc = acc * b; break;
          case 2: acc = tanh(acc); break;
          case 3: acc = sin(acc + b); break;
          case 4: acc = cos(acc) - b; break;
          case 5: acc = exp(0.5 * acc); break;
          case 6: acc = sqrt(acc * acc + 1.0); break;
          case 7: acc = acc / (b * b + 1.0); break;
          default: acc = pow(acc * acc + 0.5, 1.5); break;
        }
      }
      return acc;
    };
    auto g = ad::value_and_gradient([&](std::span<const Var> v) { return build(v[0], v[1], v[2]); }, c);
    auto fd = [&](std::vector<double> v) { return build(v[0], v[1], v[2]); };
    for (std::size_t i = 0; i < 3; ++i) {
      const double n = central(fd, c, i);
      CAPTURE(trial);
      CAPTURE(i);
      if (std::abs(n) < 1e-8) {
        CHECK(std::abs(g.gradient[i]) < 1e-8);
      } else {
        CHECK(std::abs(g.gradient[i] - n) / std::abs(n) < 1e-5);
      }
    }
  }
}

TEST_CASE("gradient is linear in the expression") {
  const std::vector<double> w{0.3, -1.1};
  auto f = [](std::span<const Var> v) { return sin(v[0]) * v[1]; };
  auto g = [](std::span<const Var> v) { return exp(v[1]) + tanh(v[0] * v[1]); };
  const double a = 2.5, b = -0.75;
  auto gf = ad::value_and_gradient(f, w).gradient;
  auto gg = ad::value_and_gradient(g, w).gradient;
  auto gc = ad::value_and_gradient([&](std::span<const Var> v) { return a * f(v) + b * g(v); }, w).gradient;
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(gc[i] - (a * gf[i] + b * gg[i])) < 1e-15);
}

TEST_CASE("param vector round trips blocks") {
  ad::ParamVector p;
  p.add_segment("W1", 2, 3);
  p.add_segment("B1", 2, 1);
  CHECK(p.size() == 8);
  const std::vector<double> flat{1, 2, 3, 4, 5, 6, 7, 8};
  p.assign(flat);
  CHECK(p.segment("B1").offset == 6);
  const auto blocks = p.unflatten();
  ad::ParamVector q;
  q.add_segment("W1", 2, 3);
  q.add_segment("B1", 2, 1);
  q.set_blocks(blocks);
  CHECK(q == p);
  CHECK_THROWS_AS(p.assign(std::vector<double>{1.0}), ConfigError);
}
