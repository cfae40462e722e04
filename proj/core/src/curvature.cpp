#include "finsler/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finsler/detail/derivatives.hpp"
#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

void require_nonzero(const Vec& y, const char* what) {
  for (double c : y)
    if (c != 0.0) return;
  throw DegenerateError(std::string(what) + ": vector is zero");
}

template <class T>
SmallMat<T> checked_metric(const FinslerStructure& s, const SmallVec<T>& x, const SmallVec<T>& y) {
  return detail::fundamental_matrix(s, x, y);
}

ConnectionCoefficients to_public(const detail::ConnectionArray<double>& c) {
  ConnectionCoefficients out;
  out.n = c.n;
  out.gamma = c.c;
  return out;
}

/// Derivative of Γ along a chart direction with the pole transported so that
/// its horizontal derivative vanishes: ∂_X Γ − N^r_j X^j ∂Γ/∂y^r.
detail::ConnectionArray<double> horizontal_derivative(const FinslerStructure& s, const Vec& x, const Vec& pole,
                                                      const Mat& nonlinear, const Vec& dir) {
  const Vec dy = -(nonlinear * dir);
  const auto lifted = detail::chern(s, detail::seeded(x, dir), detail::seeded(pole, dy));
  detail::ConnectionArray<double> out;
  out.n = lifted.n;
  for (size_t i = 0; i < out.c.size(); ++i) out.c[i] = lifted.c[i].eps;
  return out;
}

template <class T>
T unit_ball_measure(const FinslerStructure& s, const SmallVec<T>& x) {
  const int n = s.dim();
  const SphereRule& rule = sphere_rule(n);
  T acc(0.0);
  for (size_t j = 0; j < rule.nodes.size(); ++j) {
    const T f = s.norm(x, lift<T>(rule.nodes[j]));
    T fn = f;
    for (int k = 1; k < n; ++k) fn = fn * f;
    acc += rule.weights[j] / fn;
  }
  return acc / static_cast<double>(n);
}

}  // namespace

SprayData spray_coefficients(const FinslerStructure& s, const TangentVector& v) {
  require_nonzero(v.fiber, "spray_coefficients");
  try {
    return {detail::spray(s, v.base, v.fiber), detail::spray_jacobian(s, v.base, v.fiber)};
  } catch (const std::domain_error&) {
    throw DegenerateError("spray_coefficients: g_y is singular");
  }
}

ConnectionCoefficients chern_connection(const FinslerStructure& s, const TangentVector& v) {
  require_nonzero(v.fiber, "chern_connection");
  try {
    return to_public(detail::chern(s, v.base, v.fiber));
  } catch (const std::domain_error&) {
    throw DegenerateError("chern_connection: g_y is singular");
  }
}

Vec curvature_operator(const FinslerStructure& s, const Vec& x, const Vec& pole, const Vec& X, const Vec& Y,
                       const Vec& Z) {
  require_nonzero(pole, "curvature_operator");
  try {
    const Mat nl = detail::spray_jacobian(s, x, pole);
    const auto gamma = detail::chern(s, x, pole);
    const auto d_x = horizontal_derivative(s, x, pole, nl, X);
    const auto d_y = horizontal_derivative(s, x, pole, nl, Y);
    // With constant Z: ∇_X ∇_Y Z = (∂_X Γ)(Y, Z) + Γ(X, Γ(Y, Z)).
    return detail::contract(d_x, Y, Z) + detail::contract(gamma, X, detail::contract(gamma, Y, Z)) -
           detail::contract(d_y, X, Z) - detail::contract(gamma, Y, detail::contract(gamma, X, Z));
  } catch (const std::domain_error&) {
    throw DegenerateError("curvature_operator: g_y is singular");
  }
}

double flag_curvature(const FinslerStructure& s, const Flag& flag) {
  const Vec& v = flag.pole;
  const Vec& w = flag.transverse;
  require_nonzero(v, "flag_curvature");
  const Mat g = checked_metric(s, flag.at, v);
  const double gvv = bilinear(g, v, v);
  const double gww = bilinear(g, w, w);
  const double gvw = bilinear(g, v, w);
  const double gram = gvv * gww - gvw * gvw;
  if (!(gram > 1e-12 * gvv * gww)) throw DegenerateError("flag_curvature: pole and transverse vector span no plane");
  const Vec r = curvature_operator(s, flag.at, v, v, w, w);
  return bilinear(g, r, v) / gram;
}

double ricci_curvature(const FinslerStructure& s, const TangentVector& v, std::uint64_t seed) {
  require_nonzero(v.fiber, "ricci_curvature");
  const int n = s.dim();
  const Vec& x = v.base;
  const Mat g = checked_metric(s, x, v.fiber);
  const double f = s.norm(x, v.fiber);
  std::vector<Vec> basis{v.fiber / f};
  const auto candidates = sample_directions(n, 4 * n, seed);
  for (const Vec& c : candidates) {
    if (static_cast<int>(basis.size()) == n) break;
    Vec e = c;
    for (const Vec& b : basis) e = e - bilinear(g, e, b) * b;
    const double len = std::sqrt(std::max(0.0, bilinear(g, e, e)));
    if (len < 1e-6) continue;
    basis.push_back(e / len);
  }
  if (static_cast<int>(basis.size()) != n) throw DegenerateError("ricci_curvature: Gram–Schmidt failed");
  double sum = 0.0;
  for (int i = 1; i < n; ++i) sum += flag_curvature(s, {x, v.fiber, basis[i]});
  return f * f * sum;
}

double bh_density(const FinslerStructure& s, const Vec& x) {
  if (!s.in_domain(x)) throw DomainError("bh_density: point outside the chart domain");
  const double vol = unit_ball_measure(s, x);
  if (!std::isfinite(vol) || !(vol > 0.0)) throw ConvergenceError("bh_density: sphere quadrature failed");
  return unit_ball_volume(s.dim()) / vol;
}

Vec bh_log_density_gradient(const FinslerStructure& s, const Vec& x) {
  const int n = s.dim();
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const D1 vol = unit_ball_measure(s, detail::seeded(x, detail::unit<double>(n, i)));
    // ln τ = const − ln vol
    out[i] = -vol.eps / vol.re;
  }
  return out;
}

double s_curvature(const FinslerStructure& s, const TangentVector& v) {
  require_nonzero(v.fiber, "s_curvature");
  const int n = s.dim();
  const Vec& x = v.base;
  const Vec& y = v.fiber;
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto g = detail::spray(s, detail::constant(x), detail::seeded(y, detail::unit<double>(n, i)));
    div += g[i].eps;
  }
  const D1 vol = unit_ball_measure(s, detail::seeded(x, y));
  const double dlog_tau = -vol.eps / vol.re;
  return div - dlog_tau;
}

double tangential_curvature(const FinslerStructure& s, const Vec& x, const Vec& v, const Vec& w) {
  require_nonzero(v, "tangential_curvature");
  require_nonzero(w, "tangential_curvature");
  const auto gamma_w = detail::chern(s, x, w);
  const auto gamma_v = detail::chern(s, x, v);
  const Vec diff = detail::contract(gamma_w, w, w) - detail::contract(gamma_v, w, w);
  return bilinear(checked_metric(s, x, v), diff, v);
}

BerwaldReport is_berwald(const FinslerStructure& s, const SampleSpec& spec, double tol) {
  const int n = s.dim();
  BerwaldReport rep;
  const auto points = sample_points(s, spec);
  const auto dirs = sample_directions(n, 2 * spec.directions, spec.seed + 11);

  auto second_y = [&](const Vec& x, const Vec& y) {
    // H^i_jk = ∂²G^i/∂y^j∂y^k, hyper-dual seeded in the fiber.
    std::array<double, kMaxDim * kMaxDim * kMaxDim> h{};
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        SmallVec<D2> hy(n);
        for (int i = 0; i < n; ++i) hy[i] = D2(D1(y[i], k == i ? 1.0 : 0.0), D1(j == i ? 1.0 : 0.0, 0.0));
        const auto g = detail::spray(s, lift<D2>(x), hy);
        for (int i = 0; i < n; ++i) {
          h[(i * kMaxDim + j) * kMaxDim + k] = g[i].eps.eps;
          h[(i * kMaxDim + k) * kMaxDim + j] = g[i].eps.eps;
        }
      }
    }
    return h;
  };

  for (const Vec& x : points) {
    for (int k = 0; k < spec.directions; ++k) {
      const Vec& v = dirs[2 * k];
      const Vec& w = dirs[2 * k + 1];
      const double fv = s.norm(x, v);
      const double fw = s.norm(x, w);
      const double t = std::abs(tangential_curvature(s, x, v / fv, w / fw));
      const auto hv = second_y(x, v);
      const auto hw = second_y(x, w);
      double defect = 0.0;
      for (size_t i = 0; i < hv.size(); ++i) defect = std::max(defect, std::abs(hv[i] - hw[i]));
      if (t > rep.max_tangential || defect > rep.max_quadraticity_defect || rep.witness_x.size() == 0) {
        if (std::max(t, defect) >= std::max(rep.max_tangential, rep.max_quadraticity_defect)) {
          rep.witness_x = x;
          rep.witness_v = v;
          rep.witness_w = w;
        }
      }
      rep.max_tangential = std::max(rep.max_tangential, t);
      rep.max_quadraticity_defect = std::max(rep.max_quadraticity_defect, defect);
    }
  }
  rep.berwald = rep.max_tangential <= tol && rep.max_quadraticity_defect <= tol;
  return rep;
}

}  // namespace finsler
