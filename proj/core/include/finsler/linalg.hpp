#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "finsler/dual.hpp"

namespace finsler {

inline constexpr int kMaxDim = 4;

/// Fixed-capacity vector for chart coordinates and fiber components.
/// Works for `double` and every nested `Dual` scalar; never allocates.
template <class T>
class SmallVec {
 public:
  SmallVec() = default;
  explicit SmallVec(int n) : n_(n) {
    assert(n >= 0 && n <= kMaxDim);
    data_.fill(T(0.0));
  }
  SmallVec(std::initializer_list<double> values) : n_(static_cast<int>(values.size())) {
    if (n_ > kMaxDim) throw std::invalid_argument("SmallVec: dimension exceeds kMaxDim");
    data_.fill(T(0.0));
    int i = 0;
    for (double v : values) data_[i++] = T(v);
  }
  explicit SmallVec(std::span<const double> values) : n_(static_cast<int>(values.size())) {
    if (n_ > kMaxDim) throw std::invalid_argument("SmallVec: dimension exceeds kMaxDim");
    data_.fill(T(0.0));
    for (int i = 0; i < n_; ++i) data_[i] = T(values[i]);
  }

  [[nodiscard]] int size() const { return n_; }
  T& operator[](int i) { return data_[i]; }
  const T& operator[](int i) const { return data_[i]; }
  [[nodiscard]] std::span<const T> span() const { return {data_.data(), static_cast<size_t>(n_)}; }
  [[nodiscard]] std::span<T> span() { return {data_.data(), static_cast<size_t>(n_)}; }
  T* begin() { return data_.data(); }
  T* end() { return data_.data() + n_; }
  const T* begin() const { return data_.data(); }
  const T* end() const { return data_.data() + n_; }

  SmallVec& operator+=(const SmallVec& o) {
    for (int i = 0; i < n_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  SmallVec& operator-=(const SmallVec& o) {
    for (int i = 0; i < n_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  template <class S>
  SmallVec& operator*=(const S& s) {
    for (int i = 0; i < n_; ++i) data_[i] = data_[i] * s;
    return *this;
  }

 private:
  std::array<T, kMaxDim> data_{};
  int n_ = 0;
};

template <class T>
SmallVec<T> operator+(SmallVec<T> a, const SmallVec<T>& b) {
  return a += b;
}
template <class T>
SmallVec<T> operator-(SmallVec<T> a, const SmallVec<T>& b) {
  return a -= b;
}
template <class T>
SmallVec<T> operator-(SmallVec<T> a) {
  for (auto& v : a) v = -v;
  return a;
}
template <class T, class S>
SmallVec<T> operator*(const S& s, SmallVec<T> a) {
  return a *= s;
}
template <class T, class S>
SmallVec<T> operator*(SmallVec<T> a, const S& s) {
  return a *= s;
}
template <class T>
SmallVec<T> operator/(SmallVec<T> a, double s) {
  return a *= (1.0 / s);
}

template <class T>
T dot(const SmallVec<T>& a, const SmallVec<T>& b) {
  T s(0.0);
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double euclidean_norm(const SmallVec<double>& a) { return std::sqrt(dot(a, a)); }

template <class T>
SmallVec<double> primal(const SmallVec<T>& a) {
  SmallVec<double> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = primal(a[i]);
  return out;
}

/// Lift a double vector to scalar type `T` (zero derivative parts).
template <class T>
SmallVec<T> lift(const SmallVec<double>& a) {
  SmallVec<T> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = T(a[i]);
  return out;
}

/// Dense n×n matrix, row-major, fixed capacity.
template <class T>
class SmallMat {
 public:
  SmallMat() = default;
  explicit SmallMat(int n) : n_(n) { data_.fill(T(0.0)); }
  static SmallMat identity(int n) {
    SmallMat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
  [[nodiscard]] int size() const { return n_; }
  T& operator()(int i, int j) { return data_[i * kMaxDim + j]; }
  const T& operator()(int i, int j) const { return data_[i * kMaxDim + j]; }

  SmallVec<T> operator*(const SmallVec<T>& v) const {
    SmallVec<T> out(n_);
    for (int i = 0; i < n_; ++i) {
      T s(0.0);
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

 private:
  std::array<T, kMaxDim * kMaxDim> data_{};
  int n_ = 0;
};

/// Bilinear form a(u, v) = u^T A v.
template <class T>
T bilinear(const SmallMat<T>& a, const SmallVec<T>& u, const SmallVec<T>& v) {
  T s(0.0);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) s += u[i] * a(i, j) * v[j];
  return s;
}

/// Solve A x = b by Gaussian elimination with partial pivoting on the primal
/// part. Throws std::domain_error when A is numerically singular.
template <class T>
SmallVec<T> solve(SmallMat<T> a, SmallVec<T> b) {
  const int n = a.size();
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(primal(a(i, j))));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(primal(a(r, col))) > std::abs(primal(a(piv, col)))) piv = r;
    if (!(std::abs(primal(a(piv, col))) > 1e-14 * scale))
      throw std::domain_error("solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const T f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  SmallVec<T> x(n);
  for (int i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

template <class T>
SmallMat<T> inverse(const SmallMat<T>& a) {
  const int n = a.size();
  SmallMat<T> inv(n);
  for (int j = 0; j < n; ++j) {
    SmallVec<T> e(n);
    e[j] = T(1.0);
    const SmallVec<T> col = solve(a, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

using Vec = SmallVec<double>;
using Mat = SmallMat<double>;

/// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Mat& m);

}  // namespace finsler
