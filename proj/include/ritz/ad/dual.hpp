#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>

#include "ritz/ad/tape.hpp"

namespace ritz::ad {

// Forward-mode number: a value and its derivative with respect to one
// designated input. The component type T may itself be a Dual (higher-order
// forward mode) or a Var (forward-over-reverse: both components live on a
// reverse graph, so input derivatives can be differentiated again).
template <class T>
struct Dual {
  T value{};
  T deriv{};

  constexpr Dual() = default;
  constexpr Dual(double constant) : value(constant), deriv(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T v, T d) : value(std::move(v)), deriv(std::move(d)) {}
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

// ---- scalar traits ----------------------------------------------------------

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.value);
}

inline bool is_zero_constant(double x) { return x == 0.0; }
inline bool is_zero_constant(const Var& x) { return x.is_constant() && x.value() == 0.0; }
template <class T>
bool is_zero_constant(const Dual<T>& x) {
  return is_zero_constant(x.value) && is_zero_constant(x.deriv);
}

// Embeds a scalar of a lower level into T with all derivative parts zero.
template <class T, class S>
T lift(const S& s) {
  if constexpr (std::is_same_v<T, S>) {
    return s;
  } else if constexpr (is_dual<T>::value) {
    using Inner = decltype(T{}.value);
    return T(lift<Inner>(s), Inner(0.0));
  } else {
    return T(s);
  }
}

// Σ_j a(j)·b(j) for j < n. The Var overload records a single graph node; the
// Dual overload reduces to the component type, so nested forward-over-reverse
// numbers still produce compact graphs.
template <class T>
struct SumOfProducts;

template <>
struct SumOfProducts<double> {
  template <class A, class B>
  static double eval(std::size_t n, A&& a, B&& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a(j) * b(j);
    return s;
  }
};

template <>
struct SumOfProducts<Var> {
  template <class A, class B>
  static Var eval(std::size_t n, A&& a, B&& b) {
    Tape::Builder node;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Var x = a(j);
      const Var y = b(j);
      s += x.value() * y.value();
      node.add(x, y.value());
      node.add(y, x.value());
    }
    return node.finish(s);
  }
};

template <class T>
struct SumOfProducts<Dual<T>> {
  template <class A, class B>
  static Dual<T> eval(std::size_t n, A&& a, B&& b) {
    T v = SumOfProducts<T>::eval(
        n, [&](std::size_t j) { return a(j).value; }, [&](std::size_t j) { return b(j).value; });
    T d = SumOfProducts<T>::eval(
        2 * n, [&](std::size_t j) { return j < n ? a(j).value : a(j - n).deriv; },
        [&](std::size_t j) { return j < n ? b(j).deriv : b(j - n).value; });
    return Dual<T>(std::move(v), std::move(d));
  }
};

template <class T, class A, class B>
T sum_of_products(std::size_t n, A&& a, B&& b) {
  return SumOfProducts<T>::eval(n, std::forward<A>(a), std::forward<B>(b));
}

// a·b + c·d as one reduction.
template <class T>
T mul_add(const T& a, const T& b, const T& c, const T& d) {
  if constexpr (std::is_same_v<T, double>) {
    return a * b + c * d;
  } else {
    return sum_of_products<T>(
        2, [&](std::size_t j) { return j == 0 ? a : c; }, [&](std::size_t j) { return j == 0 ? b : d; });
  }
}

// ---- arithmetic on Dual ---------------------------------------------------

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.value + b.value, a.deriv + b.deriv};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.value + b, a.deriv};
}
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.value, b.deriv};
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.value - b.value, a.deriv - b.deriv};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.value - b, a.deriv};
}
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.value, -b.deriv};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.value, -a.deriv};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.value * b.value, mul_add(a.value, b.deriv, a.deriv, b.value)};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.value * b, a.deriv * b};
}
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.value, a * b.deriv};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  if (value_of(b.value) == 0.0) throw DomainError("division by zero");
  T q = a.value / b.value;
  return {q, (a.deriv - q * b.deriv) / b.value};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return {a.value / b, a.deriv / b};
}
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
  return Dual<T>(a) / b;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  return a = a + b;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  return a = a - b;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  return a = a * b;
}

// ---- elementary functions -------------------------------------------------

inline double reciprocal(double x) {
  if (x == 0.0) throw DomainError("reciprocal of zero (division by zero)");
  return 1.0 / x;
}

template <class T>
Dual<T> tanh(const Dual<T>& x) {
  using std::tanh;
  T th = tanh(x.value);
  return {th, (1.0 - th * th) * x.deriv};
}

template <class T>
Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {sin(x.value), cos(x.value) * x.deriv};
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {cos(x.value), -(sin(x.value) * x.deriv)};
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.value);
  return {e, e * x.deriv};
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  if (value_of(x.value) < 0.0) throw DomainError("sqrt of a negative value");
  T s = sqrt(x.value);
  if (value_of(s) == 0.0) {
    if (is_zero_constant(x.deriv)) return {s, T(0.0)};
    throw DomainError("sqrt is not differentiable at zero (division by zero)");
  }
  return {s, x.deriv / (2.0 * s)};
}

template <class T>
Dual<T> pow(const Dual<T>& x, double p) {
  using std::pow;
  const double base = value_of(x.value);
  if (base < 0.0 && p != std::floor(p)) throw DomainError("pow of a negative base with fractional exponent");
  if (base == 0.0 && p < 1.0 && !is_zero_constant(x.deriv)) throw DomainError("pow derivative at zero (division by zero)");
  return {pow(x.value, p), p * pow(x.value, p - 1.0) * x.deriv};
}

template <class T>
Dual<T> reciprocal(const Dual<T>& x) {
  if (value_of(x.value) == 0.0) throw DomainError("reciprocal of zero (division by zero)");
  T r = reciprocal(x.value);
  return {r, -(r * r) * x.deriv};
}

// Readers for nested forward-mode results.
template <class T>
const T& input_derivative(const Dual<T>& x) {
  return x.deriv;
}

}  // namespace ritz::ad
