#pragma once

// Forward-mode scalar carrying a value and a vector of tangents (one per
// seeded direction). Nests over itself for second derivatives in the state
// and over the reverse-mode Var for parameter gradients of state
// derivatives. Constants are represented by an empty tangent vector.

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "nidapbc/linalg.hpp"

namespace nidapbc {

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("numeric overflow in forward sweep") {}
};

inline void check_finite(double v) {
  if (!std::isfinite(v)) throw OverflowError();
}

// double-level primitives, so generic code can call them unqualified on any
// scalar the engine supports.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double exp(double x) { return std::exp(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double abs(double x) { return std::abs(x); }
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
// Hinge with the subgradient convention d/dx max(0,x) = 0 at x = 0.
inline double max0(double x) { return x > 0.0 ? x : 0.0; }
inline double max_c(double x, double c) { return x > c ? x : c; }

template <class S>
struct Fwd {
  S v{};
  std::vector<S> t;  // empty == constant (all-zero tangents)

  Fwd() = default;
  Fwd(double c) : v(c) {}  // NOLINT: implicit by design, constants broadcast
  explicit Fwd(S value) : v(std::move(value)) {}
  Fwd(S value, std::vector<S> tangents) : v(std::move(value)), t(std::move(tangents)) {}

  std::size_t width() const { return t.size(); }
  // tangent in direction i, honoring the constant representation
  S tan(std::size_t i) const { return i < t.size() ? t[i] : S(0); }
};

template <class S>
double value_of(const Fwd<S>& x) { return value_of(x.v); }

namespace detail {
template <class S>
std::size_t joint_width(const Fwd<S>& a, const Fwd<S>& b) {
  const std::size_t wa = a.width(), wb = b.width();
  if (wa != 0 && wb != 0 && wa != wb)
    throw std::logic_error("forward tangent widths disagree");
  return wa > wb ? wa : wb;
}
}  // namespace detail

template <class S>
Fwd<S> operator+(const Fwd<S>& a, const Fwd<S>& b) {
  Fwd<S> r(a.v + b.v);
  const std::size_t w = detail::joint_width(a, b);
  r.t.reserve(w);
  for (std::size_t i = 0; i < w; ++i) r.t.push_back(a.tan(i) + b.tan(i));
  check_finite(value_of(r.v));
  return r;
}

template <class S>
Fwd<S> operator-(const Fwd<S>& a, const Fwd<S>& b) {
  Fwd<S> r(a.v - b.v);
  const std::size_t w = detail::joint_width(a, b);
  r.t.reserve(w);
  for (std::size_t i = 0; i < w; ++i) r.t.push_back(a.tan(i) - b.tan(i));
  check_finite(value_of(r.v));
  return r;
}

template <class S>
Fwd<S> operator-(const Fwd<S>& a) {
  Fwd<S> r(-a.v);
  r.t.reserve(a.width());
  for (std::size_t i = 0; i < a.width(); ++i) r.t.push_back(-a.t[i]);
  return r;
}

template <class S>
Fwd<S> operator*(const Fwd<S>& a, const Fwd<S>& b) {
  Fwd<S> r(a.v * b.v);
  const std::size_t w = detail::joint_width(a, b);
  r.t.reserve(w);
  for (std::size_t i = 0; i < w; ++i) r.t.push_back(a.tan(i) * b.v + a.v * b.tan(i));
  check_finite(value_of(r.v));
  return r;
}

template <class S>
Fwd<S> operator/(const Fwd<S>& a, const Fwd<S>& b) {
  S q = a.v / b.v;
  Fwd<S> r(q);
  const std::size_t w = detail::joint_width(a, b);
  r.t.reserve(w);
  for (std::size_t i = 0; i < w; ++i) r.t.push_back((a.tan(i) - q * b.tan(i)) / b.v);
  check_finite(value_of(r.v));
  return r;
}

// mixed arithmetic with plain constants
template <class S> Fwd<S> operator+(const Fwd<S>& a, double c) { return a + Fwd<S>(c); }
template <class S> Fwd<S> operator+(double c, const Fwd<S>& a) { return Fwd<S>(c) + a; }
template <class S> Fwd<S> operator-(const Fwd<S>& a, double c) { return a - Fwd<S>(c); }
template <class S> Fwd<S> operator-(double c, const Fwd<S>& a) { return Fwd<S>(c) - a; }
template <class S> Fwd<S> operator*(const Fwd<S>& a, double c) { return a * Fwd<S>(c); }
template <class S> Fwd<S> operator*(double c, const Fwd<S>& a) { return Fwd<S>(c) * a; }
template <class S> Fwd<S> operator/(const Fwd<S>& a, double c) { return a / Fwd<S>(c); }
template <class S> Fwd<S> operator/(double c, const Fwd<S>& a) { return Fwd<S>(c) / a; }

// mixed arithmetic with the inner scalar (parameters are constants in x)
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator+(const Fwd<S>& a, const S& c) { return a + Fwd<S>(c); }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator+(const S& c, const Fwd<S>& a) { return Fwd<S>(c) + a; }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator-(const Fwd<S>& a, const S& c) { return a - Fwd<S>(c); }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator-(const S& c, const Fwd<S>& a) { return Fwd<S>(c) - a; }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator*(const Fwd<S>& a, const S& c) { return a * Fwd<S>(c); }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator*(const S& c, const Fwd<S>& a) { return Fwd<S>(c) * a; }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator/(const Fwd<S>& a, const S& c) { return a / Fwd<S>(c); }
template <class S> requires(!std::is_arithmetic_v<S>)
Fwd<S> operator/(const S& c, const Fwd<S>& a) { return Fwd<S>(c) / a; }

namespace detail {
// chain rule for unary primitives: value f(a.v), tangents f'(a.v) * a.t[i]
template <class S>
Fwd<S> unary_chain(const Fwd<S>& a, S value, S deriv) {
  Fwd<S> r(std::move(value));
  r.t.reserve(a.width());
  for (std::size_t i = 0; i < a.width(); ++i) r.t.push_back(deriv * a.t[i]);
  check_finite(value_of(r.v));
  return r;
}
}  // namespace detail

template <class S>
Fwd<S> sin(const Fwd<S>& a) { return detail::unary_chain(a, sin(a.v), cos(a.v)); }

template <class S>
Fwd<S> cos(const Fwd<S>& a) { return detail::unary_chain(a, cos(a.v), -sin(a.v)); }

template <class S>
Fwd<S> tanh(const Fwd<S>& a) {
  S th = tanh(a.v);
  return detail::unary_chain(a, th, S(1) - th * th);
}

template <class S>
Fwd<S> exp(const Fwd<S>& a) {
  S e = exp(a.v);
  return detail::unary_chain(a, e, e);
}

template <class S>
Fwd<S> log1p(const Fwd<S>& a) {
  return detail::unary_chain(a, log1p(a.v), S(1) / (S(1) + a.v));
}

template <class S>
Fwd<S> sqrt(const Fwd<S>& a) {
  S s = sqrt(a.v);
  return detail::unary_chain(a, s, S(0.5) / s);
}

template <class S>
Fwd<S> sigmoid(const Fwd<S>& a) {
  S s = sigmoid(a.v);
  return detail::unary_chain(a, s, s * (S(1) - s));
}

template <class S>
Fwd<S> softplus(const Fwd<S>& a) {
  return detail::unary_chain(a, softplus(a.v), sigmoid(a.v));
}

// |x| with derivative 0 at the kink
template <class S>
Fwd<S> abs(const Fwd<S>& a) {
  const double v = value_of(a.v);
  if (v > 0.0) return a;
  if (v < 0.0) return -a;
  return Fwd<S>(abs(a.v));  // tangents dropped: subgradient 0 at 0
}

template <class S>
Fwd<S> max0(const Fwd<S>& a) {
  return value_of(a.v) > 0.0 ? a : Fwd<S>(max0(a.v));
}

template <class S>
Fwd<S> max_c(const Fwd<S>& a, double c) {
  return value_of(a.v) > c ? a : Fwd<S>(max_c(a.v, c));
}

// Euclidean norm with gradient defined as 0 near the origin, where the
// residuals it feeds vanish anyway.
template <class T>
T vec_norm(const Vec<T>& v) {
  T s(0);
  for (std::size_t i = 0; i < v.size(); ++i) s = s + v[i] * v[i];
  if (value_of(s) < 1e-24) return T(std::sqrt(value_of(s)));
  return sqrt(s);
}

template <class T>
T fro_norm(const Mat<T>& m) {
  T s(0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s = s + m(i, j) * m(i, j);
  if (value_of(s) < 1e-24) return T(std::sqrt(value_of(s)));
  return sqrt(s);
}

}  // namespace nidapbc
