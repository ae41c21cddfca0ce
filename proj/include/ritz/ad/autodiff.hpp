#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ritz/ad/dual.hpp"
#include "ritz/ad/param_vector.hpp"
#include "ritz/ad/tape.hpp"

namespace ritz::ad {

// Value and exact t-derivative of f at t, where f accepts a Dual<double>.
template <class F>
std::pair<double, double> eval_with_input_derivative(F&& f, double t) {
  const Dual<double> out = f(Dual<double>(t, 1.0));
  return {out.value, out.deriv};
}

// d expr / d leaves. Leaves that do not influence expr get exactly 0. Any
// non-finite node on the graph is an error, even one expr does not depend on.
inline std::vector<double> gradient(const Tape& tape, const Var& expr, std::span<const Var> leaves) {
  std::vector<double> g(leaves.size(), 0.0);
  tape.check_finite();
  tape.backward(expr, 1.0, leaves, g);
  return g;
}

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

// Records f(params) on a fresh tape and returns its value and gradient.
// f receives std::span<const Var> and returns a Var.
template <class F>
ValueAndGradient value_and_gradient(F&& f, std::span<const double> params) {
  Tape tape;
  const std::vector<Var> leaves = tape.leaves(params);
  const Var out = f(std::span<const Var>(leaves));
  return {out.value(), gradient(tape, out, leaves)};
}

// Gradient with respect to params of an expression that itself contains
// t-derivatives: f receives the active input as Dual<Var> (value t, derivative
// 1) together with the parameter leaves, and returns a Var built from the
// dual components. Because the dual parts are recorded on the graph, the
// gradient includes the parameter dependence of every input derivative.
template <class F>
ValueAndGradient mixed_gradient(F&& f, std::span<const double> params, double t) {
  Tape tape;
  const std::vector<Var> leaves = tape.leaves(params);
  const Dual<Var> input(Var(t), Var(1.0));
  const Var out = f(input, std::span<const Var>(leaves));
  return {out.value(), gradient(tape, out, leaves)};
}

}  // namespace ritz::ad
