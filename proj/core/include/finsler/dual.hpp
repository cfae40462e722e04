#pragma once

#include <cmath>
#include <type_traits>

namespace finsler {

/// Forward-mode dual number `re + eps·ε` with ε² = 0.
///
/// `T` may itself be a `Dual`, which gives exact mixed partial derivatives of
/// arbitrary order by nesting: `Dual<Dual<double>>` is the hyper-dual number
/// `a + b·ε1 + c·ε2 + d·ε1ε2`, whose ε1ε2 part carries a second mixed
/// directional derivative with no truncation error.
template <class T>
struct Dual {
  T re{};
  T eps{};

  constexpr Dual() = default;
  constexpr Dual(const T& value, const T& derivative) : re(value), eps(derivative) {}
  template <class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
  constexpr Dual(S value) : re(value), eps(0.0) {}  // NOLINT(google-explicit-constructor)

  Dual& operator+=(const Dual& o) {
    re += o.re;
    eps += o.eps;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    re -= o.re;
    eps -= o.eps;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    eps = eps * o.re + re * o.eps;
    re *= o.re;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.re;
    re *= inv;
    eps = (eps - re * o.eps) * inv;
    return *this;
  }
};

using HyperDual = Dual<Dual<double>>;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost real value of a (possibly nested) dual number.
inline double primal(double v) { return v; }
template <class T>
double primal(const Dual<T>& v) {
  return primal(v.re);
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.re, -a.eps};
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

// Mixed arithmetic with plain numbers, applied at the outermost level so the
// scalar is broadcast through every nesting layer.
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator+(const Dual<T>& a, S s) {
  return {a.re + s, a.eps};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator+(S s, const Dual<T>& a) {
  return {a.re + s, a.eps};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator-(const Dual<T>& a, S s) {
  return {a.re - s, a.eps};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator-(S s, const Dual<T>& a) {
  return {s - a.re, -a.eps};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator*(const Dual<T>& a, S s) {
  return {a.re * s, a.eps * s};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator*(S s, const Dual<T>& a) {
  return {a.re * s, a.eps * s};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator/(const Dual<T>& a, S s) {
  return {a.re / s, a.eps / s};
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
Dual<T> operator/(S s, const Dual<T>& a) {
  const T inv = T(1.0) / a.re;
  return {s * inv, -s * a.eps * inv * inv};
}

// Comparisons look only at the real value; branches in norm evaluators are
// therefore taken on the primal point, which is what differentiation needs.
template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) < primal(b);
}
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) > primal(b);
}
template <class T>
bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) <= primal(b);
}
template <class T>
bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) >= primal(b);
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
bool operator<(const Dual<T>& a, S s) {
  return primal(a) < s;
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
bool operator>(const Dual<T>& a, S s) {
  return primal(a) > s;
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
bool operator<=(const Dual<T>& a, S s) {
  return primal(a) <= s;
}
template <class T, class S, std::enable_if_t<std::is_arithmetic_v<S>, int> = 0>
bool operator>=(const Dual<T>& a, S s) {
  return primal(a) >= s;
}

// Elementary functions: f(re + eps ε) = f(re) + f'(re)·eps ε.
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T r = sqrt(a.re);
  return {r, a.eps / (2.0 * r)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.re);
  return {e, e * a.eps};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.re), a.eps / a.re};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.re), cos(a.re) * a.eps};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.re), -sin(a.re) * a.eps};
}
template <class T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {sinh(a.re), cosh(a.re) * a.eps};
}
template <class T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {cosh(a.re), sinh(a.re) * a.eps};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  const T r2 = x.re * x.re + y.re * y.re;
  return {atan2(y.re, x.re), (x.re * y.eps - y.re * x.eps) / r2};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  // sign(0) = 0: a kink contributes no derivative, which is how a
  // non-smooth norm shows up as a degenerate fundamental tensor.
  const double p = primal(a);
  if (p > 0.0) return a;
  if (p < 0.0) return -a;
  return {a.re, a.eps * 0.0};
}
template <class T>
Dual<T> pow(const Dual<T>& a, double k) {
  using std::pow;
  const T pk1 = pow(a.re, k - 1.0);
  return {pk1 * a.re, k * pk1 * a.eps};
}

/// Lift a plain value to a dual with zero derivative.
template <class T>
T lift(double v) {
  return T(v);
}

}  // namespace finsler
