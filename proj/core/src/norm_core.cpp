#include "finsler/norm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "finsler/detail/derivatives.hpp"
#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

void require_nonzero(const Vec& y, const char* what) {
  for (double c : y)
    if (c != 0.0) return;
  throw DegenerateError(std::string(what) + ": fiber vector is zero");
}

double checked_norm(const FinslerStructure& s, const Vec& x, const Vec& y) {
  const double f = s.norm(x, y);
  if (!std::isfinite(f)) throw Error("norm evaluator returned a non-finite value");
  return f;
}

double bilinear_at(const FinslerStructure& s, const Vec& x, const Vec& y, const Vec& u, const Vec& w) {
  return bilinear(detail::fundamental_matrix(s, x, y), u, w);
}

Vec energy_gradient(const FinslerStructure& s, const Vec& x, const Vec& y) {
  const int n = s.dim();
  const Vec zero(n);
  Vec grad(n);
  for (int i = 0; i < n; ++i) grad[i] = detail::energy_d1(s, x, y, zero, detail::unit<double>(n, i)).eps;
  return grad;
}

/// Direction set used to seed searches over the indicatrix.
std::vector<Vec> search_directions(int n) { return sphere_rule(n).nodes; }

}  // namespace

double eval_norm(const FinslerStructure& s, const TangentVector& v) {
  if (!s.in_domain(v.base)) throw DomainError("eval_norm: base point outside the chart domain");
  return checked_norm(s, v.base, v.fiber);
}

Mat fundamental_matrix_unchecked(const FinslerStructure& s, const Vec& x, const Vec& y) {
  return detail::fundamental_matrix(s, x, y);
}

FundamentalTensor fundamental_tensor(const FinslerStructure& s, const TangentVector& v) {
  require_nonzero(v.fiber, "fundamental_tensor");
  if (!s.in_domain(v.base)) throw DomainError("fundamental_tensor: base point outside the chart domain");
  Mat g = detail::fundamental_matrix(s, v.base, v.fiber);
  const auto eig = symmetric_eigenvalues(g);
  if (!(eig.front() > 1e-12 * std::abs(eig.back())))
    throw DegenerateError("fundamental_tensor: g_y is not positive definite (strong convexity fails)");
  return {g, v};
}

double cartan_tensor(const FinslerStructure& s, const TangentVector& v, const Vec& u1, const Vec& u2, const Vec& u3) {
  require_nonzero(v.fiber, "cartan_tensor");
  const Vec& x = v.base;
  const Vec& y = v.fiber;
  const double h = 1e-5 * euclidean_norm(y);
  auto central = [&](double step) {
    return (bilinear_at(s, x, y + step * u3, u1, u2) - bilinear_at(s, x, y - step * u3, u1, u2)) / (2.0 * step);
  };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return 0.5 * (4.0 * fine - coarse) / 3.0;
}

TangentVector legendre_transform(const FinslerStructure& s, const Covector& omega) {
  const int n = s.dim();
  const Vec& x = omega.base;
  const Vec& w = omega.components;
  require_nonzero(w, "legendre_transform");
  if (!s.in_domain(x)) throw DomainError("legendre_transform: base point outside the chart domain");

  // Coarse maximization of ω over the indicatrix, then Newton on E_y(y) = ω,
  // the stationarity condition of the strictly convex function E(y) − ω(y).
  double best = -std::numeric_limits<double>::infinity();
  Vec best_u;
  for (const Vec& th : search_directions(n)) {
    const Vec u = th / checked_norm(s, x, th);
    const double val = dot(w, u);
    if (val > best) {
      best = val;
      best_u = u;
    }
  }
  if (!(best > 0.0)) throw ConvergenceError("legendre_transform: indicatrix search found no positive pairing");
  Vec y = best * best_u;

  const double tol = 1e-10 * std::max(1.0, euclidean_norm(w));
  auto objective = [&](const Vec& z) { return 0.5 * std::pow(checked_norm(s, x, z), 2) - dot(w, z); };
  for (int iter = 0; iter < 100; ++iter) {
    const Vec resid = energy_gradient(s, x, y) - w;
    if (euclidean_norm(resid) <= tol) return {x, y};
    const Mat g = detail::fundamental_matrix(s, x, y);
    const Vec step = solve(g, resid);
    double t = 1.0;
    const double f0 = objective(y);
    Vec trial = y - step;
    while (objective(trial) > f0 + 1e-14 * std::abs(f0) && t > 1e-8) {
      t *= 0.5;
      trial = y - t * step;
    }
    y = trial;
  }
  const Vec resid = energy_gradient(s, x, y) - w;
  if (euclidean_norm(resid) <= tol) return {x, y};
  throw ConvergenceError("legendre_transform: Newton iteration did not reach stationarity 1e-10");
}

double dual_norm(const FinslerStructure& s, const Covector& omega) {
  const TangentVector y = legendre_transform(s, omega);
  return checked_norm(s, y.base, y.fiber);
}

TangentVector gradient_field(const FinslerStructure& s, const std::function<double(const Vec&)>& u, const Vec& x) {
  const int n = s.dim();
  Vec du(n);
  const double h = 1e-4 * std::max(1.0, euclidean_norm(x));
  for (int i = 0; i < n; ++i) {
    const Vec e = detail::unit<double>(n, i);
    auto central = [&](double step) { return (u(x + step * e) - u(x - step * e)) / (2.0 * step); };
    du[i] = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  if (euclidean_norm(du) < 1e-12) return {x, Vec(n)};
  return legendre_transform(s, {x, du});
}

double reversibility_constant(const FinslerStructure& s, const SampleSpec& spec) {
  const int n = s.dim();
  const auto points = sample_points(s, spec);
  auto ratio = [&](const Vec& x, const Vec& y) { return checked_norm(s, x, -y) / checked_norm(s, x, y); };
  double rho = 1.0;
  for (const Vec& x : points) {
    double best = -1.0;
    Vec best_dir;
    for (const Vec& th : search_directions(n)) {
      for (const Vec& d : {th, Vec(-th)}) {
        const double r = ratio(x, d);
        if (r > best) {
          best = r;
          best_dir = d;
        }
      }
    }
    // Local refinement by a shrinking random-perturbation hill climb; in the
    // plane this reduces to a 1D search in the angle.
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    double step = 2.0 * std::numbers::pi / 512.0;
    while (step > 1e-10) {
      bool improved = false;
      for (int trial = 0; trial < 8 * n; ++trial) {
        Vec d = best_dir;
        for (int i = 0; i < n; ++i) d[i] += step * normal(rng);
        d = d / euclidean_norm(d);
        const double r = ratio(x, d);
        if (r > best) {
          best = r;
          best_dir = d;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    rho = std::max(rho, best);
  }
  return rho;
}

std::vector<TangentVector> indicatrix_sample(const FinslerStructure& s, const Vec& x, int count, std::uint64_t seed) {
  const int n = s.dim();
  if (count < 1) throw DomainError("indicatrix_sample: count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> dirs;
  if (n == 2) {
    const double offset = unif(rng);
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + offset) / count;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else if (n == 3) {
    // Spherical Fibonacci lattice with a random azimuthal offset.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double offset = 2.0 * std::numbers::pi * unif(rng);
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = offset + golden * j;
      dirs.push_back(Vec{r * std::cos(ph), r * std::sin(ph), z});
    }
  } else {
    dirs = sample_directions(n, count, seed);
  }
  std::vector<TangentVector> out;
  out.reserve(count);
  for (const Vec& d : dirs) out.push_back({x, d / checked_norm(s, x, d)});
  return out;
}

ValidationReport validate_structure(const FinslerStructure& s, const SampleSpec& spec) {
  const int n = s.dim();
  ValidationReport rep;
  rep.smoothness.name = "F1 smoothness proxy";
  rep.homogeneity.name = "F2 positive homogeneity";
  rep.positivity.name = "positivity";
  rep.convexity.name = "F3 strong convexity";
  rep.positivity.worst = std::numeric_limits<double>::infinity();
  rep.convexity.worst = std::numeric_limits<double>::infinity();

  const auto points = sample_points(s, spec);
  const auto dirs = sample_directions(n, spec.directions, spec.seed + 1);
  const auto probes = sample_directions(n, spec.directions, spec.seed + 2);
  auto e2 = [&](const Vec& x, const Vec& y) {
    const double f = s.norm(x, y);
    return f * f;
  };

  for (const Vec& x : points) {
    for (size_t k = 0; k < dirs.size(); ++k) {
      const Vec& y = dirs[k];
      const double f = s.norm(x, y);
      if (!std::isfinite(f) || f < rep.positivity.worst) {
        rep.positivity.worst = std::isfinite(f) ? f : -std::numeric_limits<double>::infinity();
        rep.positivity.witness_x = x;
        rep.positivity.witness_y = y;
      }
      for (double lambda : {0.1, 0.5, 2.0, 10.0}) {
        const double fl = s.norm(x, lambda * y);
        const double err = std::abs(fl - lambda * f) / std::max(std::abs(lambda * f), 1e-300);
        if (!(err <= rep.homogeneity.worst)) {
          rep.homogeneity.worst = err;
          rep.homogeneity.witness_x = x;
          rep.homogeneity.witness_y = y;
        }
      }
      const Mat g = detail::fundamental_matrix(s, x, y);
      const auto eig = symmetric_eigenvalues(g);
      const double rel = eig.front() / std::max(std::abs(eig.back()), 1e-300);
      if (!(rel >= rep.convexity.worst)) {
        rep.convexity.worst = std::isfinite(rel) ? rel : -std::numeric_limits<double>::infinity();
        rep.convexity.witness_x = x;
        rep.convexity.witness_y = y;
      }
      const Vec& d = probes[k];
      auto second = [&](double h) { return (e2(x, y + h * d) - 2.0 * e2(x, y) + e2(x, y - h * d)) / (h * h); };
      const double s1 = second(1e-3);
      const double s2 = second(5e-4);
      const double incons = std::abs(s1 - s2) / (1.0 + std::abs(s2));
      if (!(incons <= rep.smoothness.worst)) {
        rep.smoothness.worst = incons;
        rep.smoothness.witness_x = x;
        rep.smoothness.witness_y = y;
      }
    }
  }
  rep.homogeneity.pass = rep.homogeneity.worst <= 1e-10;
  rep.positivity.pass = rep.positivity.worst > 0.0;
  rep.convexity.pass = rep.convexity.worst > 1e-10;
  rep.smoothness.pass = rep.smoothness.worst <= 1e-4;
  return rep;
}

}  // namespace finsler
