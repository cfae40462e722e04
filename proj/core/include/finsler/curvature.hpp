#pragma once

#include <array>
#include <cstdint>

#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler {

/// G^i(x, y) and N^i_j = ∂G^i/∂y^j.
struct SprayData {
  Vec coefficients;
  Mat jacobian;
};

/// Chern connection coefficients Γ^i_jk at (x, y), symmetric in (j, k).
struct ConnectionCoefficients {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> gamma{};
  double operator()(int i, int j, int k) const { return gamma[(i * kMaxDim + j) * kMaxDim + k]; }
  double& operator()(int i, int j, int k) { return gamma[(i * kMaxDim + j) * kMaxDim + k]; }
};

SprayData spray_coefficients(const FinslerStructure& s, const TangentVector& v);

ConnectionCoefficients chern_connection(const FinslerStructure& s, const TangentVector& v);

/// R^V(X, Y)Z = ∇^V_X ∇^V_Y Z − ∇^V_Y ∇^V_X Z for X, Y, Z extended with
/// constant chart components (so [X, Y] = 0). The pole field V is extended
/// from `pole` so that its horizontal derivative vanishes at x, which makes
/// the result the Chern hh-curvature contracted with (X, Y, Z).
Vec curvature_operator(const FinslerStructure& s, const Vec& x, const Vec& pole, const Vec& X, const Vec& Y,
                       const Vec& Z);

/// Flag curvature K^v(v, w). Throws DegenerateError when v and w are
/// g_v-dependent (Gram determinant below 1e-12 of its scale).
double flag_curvature(const FinslerStructure& s, const Flag& flag);

/// Ric(v) = F(v)² Σ K^v(v, e_i) over a g_v-orthonormal completion of v/F(v);
/// `seed` picks the random starting vectors for Gram–Schmidt.
double ricci_curvature(const FinslerStructure& s, const TangentVector& v, std::uint64_t seed = 7);

/// Busemann–Hausdorff density τ_F(x) = vol(B^n) / vol{y : F(x, y) ≤ 1}.
double bh_density(const FinslerStructure& s, const Vec& x);

/// ∂(ln τ_F)/∂x^i, differentiated through the fixed sphere nodes.
Vec bh_log_density_gradient(const FinslerStructure& s, const Vec& x);

/// S(y) = ∂G^i/∂y^i − y^i ∂(ln τ_F)/∂x^i.
double s_curvature(const FinslerStructure& s, const TangentVector& v);

/// T(v, w)(x) = g_v(∇^W_W W − ∇^V_W W, V) with constant-coefficient
/// extensions V, W of v, w, i.e. g_v(Γ(x, w)(w, w) − Γ(x, v)(w, w), v).
double tangential_curvature(const FinslerStructure& s, const Vec& x, const Vec& v, const Vec& w);

struct BerwaldReport {
  bool berwald = false;
  double max_tangential = 0.0;           ///< max |T(v, w)| over samples
  double max_quadraticity_defect = 0.0;  ///< max change of ∂²G/∂y∂y between two fibers directions
  Vec witness_x;
  Vec witness_v;
  Vec witness_w;
};

/// Sampled Berwald test: both the tangential curvature and the y-variation of
/// ∂²G^i/∂y^j∂y^k must stay below `tol`. The worst sample is returned as witness.
BerwaldReport is_berwald(const FinslerStructure& s, const SampleSpec& spec, double tol = 1e-6);

}  // namespace finsler
