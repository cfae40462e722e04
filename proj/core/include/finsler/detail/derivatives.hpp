#pragma once

// Generic derivative engine. Every function here is templated on the scalar
// type so it can itself be differentiated by running it on Dual<T>; the norm
// supports nesting up to depth four (see NormFunction), which bounds how far
// these functions can be stacked.

#include <array>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler::detail {

template <class T>
SmallVec<Dual<T>> seeded(const SmallVec<T>& v, const SmallVec<T>& dv) {
  SmallVec<Dual<T>> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = Dual<T>(v[i], dv[i]);
  return out;
}

template <class T>
SmallVec<Dual<T>> constant(const SmallVec<T>& v) {
  SmallVec<Dual<T>> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = Dual<T>(v[i], T(0.0));
  return out;
}

template <class T>
SmallVec<T> unit(int n, int i) {
  SmallVec<T> e(n);
  e[i] = T(1.0);
  return e;
}

template <class T>
SmallVec<T> eps_part(const SmallVec<Dual<T>>& v) {
  SmallVec<T> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = v[i].eps;
  return out;
}

template <class T>
SmallVec<T> re_part(const SmallVec<Dual<T>>& v) {
  SmallVec<T> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = v[i].re;
  return out;
}

template <class T>
SmallMat<T> eps_part(const SmallMat<Dual<T>>& m) {
  SmallMat<T> out(m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) out(i, j) = m(i, j).eps;
  return out;
}

/// E = F²/2.
template <class T>
T energy(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  const T f = s.norm(x, y);
  return 0.5 * f * f;
}

/// First directional derivative of E along (ax, ay); returns (E, ∂E).
template <class T>
Dual<T> energy_d1(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y, const SmallVec<T>& ax,
                  const SmallVec<T>& ay) {
  return energy(s, seeded(x, ax), seeded(y, ay));
}

/// Mixed second directional derivative ∂_a ∂_b E via a hyper-dual evaluation.
template <class T>
T energy_d2(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y, const SmallVec<T>& ax,
            const SmallVec<T>& ay, const SmallVec<T>& bx, const SmallVec<T>& by) {
  using H = Dual<Dual<T>>;
  const int n = x.size();
  SmallVec<H> hx(n);
  SmallVec<H> hy(n);
  for (int i = 0; i < n; ++i) {
    hx[i] = H(Dual<T>(x[i], bx[i]), Dual<T>(ax[i], T(0.0)));
    hy[i] = H(Dual<T>(y[i], by[i]), Dual<T>(ay[i], T(0.0)));
  }
  return energy(s, hx, hy).eps.eps;
}

/// g_ij(x, y) = ∂²E/∂y^i∂y^j.
template <class T>
SmallMat<T> fundamental_matrix(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  const int n = x.size();
  const SmallVec<T> zero(n);
  SmallMat<T> g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = energy_d2(s, x, y, zero, unit<T>(n, i), zero, unit<T>(n, j));
      g(j, i) = g(i, j);
    }
  }
  return g;
}

/// Spray coefficients G^i = ½ g^{il} (E_{x^k y^l} y^k − E_{x^l}), the
/// Euler–Lagrange form of the geodesic equation ẍ + 2G(x, ẋ) = 0.
template <class T>
SmallVec<T> spray(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  const int n = x.size();
  const SmallVec<T> zero(n);
  const SmallMat<T> g = fundamental_matrix(s, x, y);
  SmallVec<T> rhs(n);
  for (int l = 0; l < n; ++l) {
    const T mixed = energy_d2(s, x, y, y, zero, zero, unit<T>(n, l));
    const T ex = energy_d1(s, x, y, unit<T>(n, l), zero).eps;
    rhs[l] = 0.5 * (mixed - ex);
  }
  return solve(g, rhs);
}

/// N^i_j = ∂G^i/∂y^j (the nonlinear connection).
template <class T>
SmallMat<T> spray_jacobian(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  const int n = x.size();
  SmallMat<T> out(n);
  for (int j = 0; j < n; ++j) {
    const SmallVec<T> col = eps_part(spray(s, constant(x), seeded(y, unit<T>(n, j))));
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

/// Γ^i_jk stored densely.
template <class T>
struct ConnectionArray {
  int n = 0;
  std::array<T, kMaxDim * kMaxDim * kMaxDim> c{};
  T& operator()(int i, int j, int k) { return c[(i * kMaxDim + j) * kMaxDim + k]; }
  const T& operator()(int i, int j, int k) const { return c[(i * kMaxDim + j) * kMaxDim + k]; }
};

/// Chern connection Γ^i_jk = ½ g^{il} (δ_k g_lj − δ_l g_jk + δ_j g_kl) with
/// δ_k = ∂/∂x^k − N^r_k ∂/∂y^r.
template <class T>
ConnectionArray<T> chern(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  const int n = x.size();
  const SmallMat<T> g = fundamental_matrix(s, x, y);
  const SmallMat<T> ginv = inverse(g);
  std::array<SmallMat<T>, kMaxDim> dgdx;
  std::array<SmallMat<T>, kMaxDim> dgdy;
  for (int k = 0; k < n; ++k) {
    dgdx[k] = eps_part(fundamental_matrix(s, seeded(x, unit<T>(n, k)), constant(y)));
    dgdy[k] = eps_part(fundamental_matrix(s, constant(x), seeded(y, unit<T>(n, k))));
  }
  const SmallMat<T> nl = spray_jacobian(s, x, y);
  auto delta = [&](int k, int a, int b) {
    T v = dgdx[k](a, b);
    for (int r = 0; r < n; ++r) v -= nl(r, k) * dgdy[r](a, b);
    return v;
  };
  ConnectionArray<T> out;
  out.n = n;
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      SmallVec<T> bracket(n);
      for (int l = 0; l < n; ++l) bracket[l] = delta(k, l, j) - delta(l, j, k) + delta(j, k, l);
      for (int i = 0; i < n; ++i) {
        T v(0.0);
        for (int l = 0; l < n; ++l) v += ginv(i, l) * bracket[l];
        out(i, j, k) = 0.5 * v;
        out(i, k, j) = out(i, j, k);
      }
    }
  }
  return out;
}

/// Contract Γ(u, w)^i = Γ^i_jk u^j w^k.
template <class T>
SmallVec<T> contract(const ConnectionArray<T>& gamma, const SmallVec<T>& u, const SmallVec<T>& w) {
  const int n = gamma.n;
  SmallVec<T> out(n);
  for (int i = 0; i < n; ++i) {
    T v(0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) v += gamma(i, j, k) * u[j] * w[k];
    out[i] = v;
  }
  return out;
}

}  // namespace finsler::detail
