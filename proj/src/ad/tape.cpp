#include "ritz/ad/tape.hpp"

#include <sstream>

namespace ritz::ad {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kNeg: return "neg";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSin: return "sin";
    case OpKind::kCos: return "cos";
    case OpKind::kExp: return "exp";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kPow: return "pow";
    case OpKind::kReciprocal: return "reciprocal";
    case OpKind::kSumOfProducts: return "sum_of_products";
    case OpKind::kFused: return "fused";
  }
  return "unknown";
}

void Tape::check_finite() const {
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = std::isfinite(values_[i]);
    for (std::uint32_t k = offsets_[i]; ok && k < offsets_[i + 1]; ++k) ok = std::isfinite(partials_[k]);
    if (!ok) {
      std::ostringstream msg;
      msg << "non-finite value in expression graph at node " << i << " (" << op_name(kinds_[i]) << ")";
      throw NumericalError(msg.str());
    }
  }
}

void Tape::sweep(std::uint32_t output, double seed) const {
  adjoint_.assign(static_cast<std::size_t>(output) + 1, 0.0);
  adjoint_[output] = seed;
  const std::uint32_t* args = args_.data();
  const double* partials = partials_.data();
  for (std::int64_t i = output; i >= 0; --i) {
    const double a = adjoint_[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    const std::uint32_t end = offsets_[static_cast<std::size_t>(i) + 1];
    for (std::uint32_t k = offsets_[static_cast<std::size_t>(i)]; k < end; ++k) {
      adjoint_[args[k]] += partials[k] * a;
    }
  }
}

std::vector<double> Tape::adjoints(const Var& output, double seed) const {
  std::vector<double> out(values_.size(), 0.0);
  if (output.is_constant()) return out;
  if (output.tape() != this) throw ConfigError("output variable belongs to a different tape");
  check_finite();
  sweep(output.index(), seed);
  std::copy(adjoint_.begin(), adjoint_.end(), out.begin());
  return out;
}

void Tape::backward(const Var& output, double seed, std::span<const Var> leaves,
                    std::span<double> grad) const {
  if (grad.size() != leaves.size()) throw ConfigError("gradient buffer does not match leaf count");
  if (output.is_constant()) return;
  if (output.tape() != this) throw ConfigError("output variable belongs to a different tape");
  if (!std::isfinite(output.value())) check_finite();
  sweep(output.index(), seed);
  bool finite = true;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Var& leaf = leaves[i];
    if (leaf.is_constant() || leaf.index() > output.index()) continue;
    if (leaf.tape() != this) throw ConfigError("leaf variable belongs to a different tape");
    const double a = adjoint_[leaf.index()];
    finite = finite && std::isfinite(a);
    grad[i] += a;
  }
  // A full scan is only needed to name the culprit.
  if (!finite) {
    check_finite();
    throw NumericalError("non-finite gradient from a finite expression graph");
  }
}

}  // namespace ritz::ad
