#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ritz/error.hpp"

namespace ritz::ad {

enum class OpKind : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kTanh,
  kSin,
  kCos,
  kExp,
  kSqrt,
  kPow,
  kReciprocal,
  kSumOfProducts,
  kFused,
};

std::string_view op_name(OpKind kind);

class Tape;

// Scalar recorded on a Tape. A Var without a tape is a constant and never
// produces graph nodes.
class Var {
 public:
  Var() = default;
  Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

// Reverse-mode expression graph. Nodes are appended in evaluation order, so
// the node list is always topologically sorted and one backward pass visits
// every node once. Each node stores its operand indices together with the
// local partial derivative of the node with respect to each operand.
class Tape {
 public:
  Tape() { offsets_.push_back(0); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Drops all nodes but keeps allocated capacity.
  void clear() {
    values_.clear();
    kinds_.clear();
    offsets_.assign(1, 0);
    args_.clear();
    partials_.clear();
    staged_args_.clear();
    staged_partials_.clear();
  }

  void reserve(std::size_t nodes, std::size_t operands) {
    values_.reserve(nodes);
    kinds_.reserve(nodes);
    offsets_.reserve(nodes + 1);
    args_.reserve(operands);
    partials_.reserve(operands);
  }

  std::size_t size() const { return values_.size(); }
  std::size_t operand_count() const { return args_.size(); }
  OpKind kind(std::uint32_t node) const { return kinds_[node]; }

  Var leaf(double value) { return push(OpKind::kLeaf, value); }

  std::vector<Var> leaves(std::span<const double> values) {
    std::vector<Var> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(leaf(v));
    return out;
  }

  // f(a) with local derivative da.
  static Var unary(OpKind kind, double value, const Var& a, double da) {
    if (a.is_constant()) return Var(value);
    Tape& t = *a.tape_;
    t.args_.push_back(a.index_);
    t.partials_.push_back(da);
    return t.push(kind, value);
  }

  // f(a, b) with local derivatives da, db.
  static Var binary(OpKind kind, double value, const Var& a, double da, const Var& b, double db) {
    Tape* t = a.tape_ ? a.tape_ : b.tape_;
    if (t == nullptr) return Var(value);
    if (a.tape_) {
      t->args_.push_back(a.index_);
      t->partials_.push_back(da);
    }
    if (b.tape_) {
      t->args_.push_back(b.index_);
      t->partials_.push_back(db);
    }
    return t->push(kind, value);
  }

  // Accumulates one n-ary node term by term; used for dot products and for
  // fused kernels that supply their own partial derivatives. Operands are
  // staged on the tape until finish(), so the operand expressions may record
  // nodes (and nested builders) of their own while the node is assembled.
  class Builder {
   public:
    explicit Builder(OpKind kind = OpKind::kSumOfProducts) : kind_(kind) {}
    Builder(const Builder&) = delete;
    Builder& operator=(const Builder&) = delete;

    void add(const Var& x, double partial) {
      if (x.is_constant() || partial == 0.0) return;
      if (tape_ == nullptr) {
        tape_ = x.tape();
        start_ = tape_->staged_args_.size();
      }
      tape_->staged_args_.push_back(x.index());
      tape_->staged_partials_.push_back(partial);
    }

    Var finish(double value) {
      if (tape_ == nullptr) return Var(value);
      Tape& t = *tape_;
      tape_ = nullptr;
      if (t.staged_args_.size() < start_) throw ConfigError("graph builders finished out of order");
      t.args_.insert(t.args_.end(), t.staged_args_.begin() + static_cast<std::ptrdiff_t>(start_),
                     t.staged_args_.end());
      t.partials_.insert(t.partials_.end(), t.staged_partials_.begin() + static_cast<std::ptrdiff_t>(start_),
                         t.staged_partials_.end());
      t.staged_args_.resize(start_);
      t.staged_partials_.resize(start_);
      return t.push(kind_, value);
    }

   private:
    OpKind kind_;
    Tape* tape_ = nullptr;
    std::size_t start_ = 0;
  };

  // Full adjoint vector d(output)/d(node) for every node.
  std::vector<double> adjoints(const Var& output, double seed = 1.0) const;

  // Adds seed * d(output)/d(leaf) into grad[i] for each leaf in `leaves`.
  void backward(const Var& output, double seed, std::span<const Var> leaves,
                std::span<double> grad) const;

  // Throws NumericalError naming the first node whose value or local partial is non-finite.
  void check_finite() const;

 private:
  Var push(OpKind kind, double value) {
    const auto index = static_cast<std::uint32_t>(values_.size());
    values_.push_back(value);
    kinds_.push_back(kind);
    offsets_.push_back(static_cast<std::uint32_t>(args_.size()));
    return Var(this, index, value);
  }

  void sweep(std::uint32_t output, double seed) const;

  std::vector<double> values_;
  std::vector<OpKind> kinds_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> args_;
  std::vector<double> partials_;
  std::vector<std::uint32_t> staged_args_;
  std::vector<double> staged_partials_;
  mutable std::vector<double> adjoint_;
};

// ---- arithmetic on Var ----------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
  return Tape::binary(OpKind::kAdd, a.value() + b.value(), a, 1.0, b, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
  return Tape::binary(OpKind::kSub, a.value() - b.value(), a, 1.0, b, -1.0);
}
inline Var operator-(const Var& a) { return Tape::unary(OpKind::kNeg, -a.value(), a, -1.0); }

inline Var operator*(const Var& a, const Var& b) {
  if ((a.is_constant() && a.value() == 0.0) || (b.is_constant() && b.value() == 0.0)) return Var(0.0);
  return Tape::binary(OpKind::kMul, a.value() * b.value(), a, b.value(), b, a.value());
}

inline Var operator/(const Var& a, const Var& b) {
  if (b.value() == 0.0) throw DomainError("division by zero");
  const double q = a.value() / b.value();
  return Tape::binary(OpKind::kDiv, q, a, 1.0 / b.value(), b, -q / b.value());
}

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

inline Var tanh(const Var& x) {
  const double th = std::tanh(x.value());
  return Tape::unary(OpKind::kTanh, th, x, 1.0 - th * th);
}
inline Var sin(const Var& x) {
  return Tape::unary(OpKind::kSin, std::sin(x.value()), x, std::cos(x.value()));
}
inline Var cos(const Var& x) {
  return Tape::unary(OpKind::kCos, std::cos(x.value()), x, -std::sin(x.value()));
}
inline Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return Tape::unary(OpKind::kExp, e, x, e);
}

inline Var sqrt(const Var& x) {
  if (x.value() < 0.0) throw DomainError("sqrt of a negative value");
  const double s = std::sqrt(x.value());
  if (s == 0.0) {
    if (x.is_constant()) return Var(0.0);
    throw DomainError("sqrt is not differentiable at zero (division by zero)");
  }
  return Tape::unary(OpKind::kSqrt, s, x, 0.5 / s);
}

inline Var pow(const Var& x, double p) {
  if (x.value() < 0.0 && p != std::floor(p)) throw DomainError("pow of a negative base with fractional exponent");
  if (x.value() == 0.0 && p < 1.0 && !x.is_constant()) throw DomainError("pow derivative at zero (division by zero)");
  const double v = std::pow(x.value(), p);
  return Tape::unary(OpKind::kPow, v, x, p * std::pow(x.value(), p - 1.0));
}

inline Var reciprocal(const Var& x) {
  if (x.value() == 0.0) throw DomainError("reciprocal of zero (division by zero)");
  const double r = 1.0 / x.value();
  return Tape::unary(OpKind::kReciprocal, r, x, -r * r);
}

}  // namespace ritz::ad
