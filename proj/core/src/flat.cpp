#include "finsler/detail/flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "finsler/detail/derivatives.hpp"
#include "finsler/errors.hpp"

namespace finsler::detail {

namespace {

struct Distortion {
  double lower;  ///< c with F(z) ≥ c|z|
  double rho;    ///< bound on F(−z)/F(z)
};

// Coarse bounds from 64 directions, padded by a factor of two: they only size
// enumeration windows, so generous is safe and tight is unnecessary.
Distortion distortion(const FinslerStructure& s) {
  const int n = s.dim();
  const Vec origin(n);
  std::vector<Vec> dirs;
  if (n == 2) {
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * std::numbers::pi * j / 64.0;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else {
    dirs = sample_directions(n, 256, 0x5eed);
  }
  double lo = std::numeric_limits<double>::infinity();
  double rho = 1.0;
  for (const Vec& d : dirs) {
    const double f = s.norm(origin, d);
    lo = std::min(lo, f);
    rho = std::max(rho, s.norm(origin, Vec(-d)) / f);
  }
  return {0.5 * lo, 2.0 * rho};
}

double min_singular_value(const std::vector<Vec>& lattice, int n) {
  Eigen::MatrixXd w(n, static_cast<int>(lattice.size()));
  for (size_t j = 0; j < lattice.size(); ++j)
    for (int i = 0; i < n; ++i) w(i, static_cast<int>(j)) = lattice[j][i];
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  return svd.singularValues().minCoeff();
}

/// Translations k with F(k) ≤ bound.
std::vector<Vec> translations_within(const FinslerStructure& s, double bound, const Distortion& dist) {
  const int n = s.dim();
  const Vec origin(n);
  const double sigma = min_singular_value(s.lattice(), n);
  const int coeff = static_cast<int>(std::ceil(bound / (dist.lower * sigma))) + 1;
  std::vector<Vec> out;
  for (const Vec& k : s.deck_translations(coeff))
    if (s.norm(origin, k) <= bound * (1.0 + 1e-12)) out.push_back(k);
  return out;
}

/// Argmin of a convex function on R by bracketing and golden section.
template <class Fn>
double convex_argmin(Fn&& f, double start) {
  double step = 1.0;
  double a = start - step;
  double b = start + step;
  while (f(a - step) < f(a)) {
    a -= step;
    step *= 2.0;
  }
  step = 1.0;
  while (f(b + step) < f(b)) {
    b += step;
    step *= 2.0;
  }
  a -= 1.0;
  b += 1.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<Vec> rank_one_candidates(const FinslerStructure& s, const Vec& z, double tol) {
  const Vec origin(s.dim());
  const Vec& w = s.lattice().front();
  auto f = [&](double c) { return s.norm(origin, z + c * w); };
  const double c_hat = convex_argmin(f, -dot(z, w) / dot(w, w));
  double best = std::numeric_limits<double>::infinity();
  long lo = static_cast<long>(std::floor(c_hat));
  long hi = lo + 1;
  for (long c = lo - 1; c <= hi + 1; ++c) best = std::min(best, f(static_cast<double>(c)));
  const double thr = best * (1.0 + tol) + 1e-300;
  // Convexity: the sublevel set is an interval, scan outward until it ends.
  while (f(static_cast<double>(lo - 1)) <= thr) --lo;
  while (f(static_cast<double>(hi + 1)) <= thr) ++hi;
  std::vector<Vec> out;
  for (long c = lo; c <= hi; ++c) {
    const Vec cand = z + static_cast<double>(c) * w;
    if (s.norm(origin, cand) <= thr) out.push_back(cand);
  }
  return out;
}

std::vector<Vec> full_rank_candidates(const FinslerStructure& s, const Vec& z, double tol) {
  const int n = s.dim();
  const Vec origin(n);
  const Distortion dist = distortion(s);
  const Vec z0 = s.reduce(z, origin);
  const double f0 = s.norm(origin, z0);
  double best = f0;
  std::vector<Vec> cands;
  for (const Vec& k : translations_within(s, (1.0 + tol + dist.rho) * f0, dist)) {
    const Vec c = z0 + k;
    cands.push_back(c);
    best = std::min(best, s.norm(origin, c));
  }
  std::vector<Vec> out;
  const double thr = best * (1.0 + tol) + 1e-300;
  for (const Vec& c : cands)
    if (s.norm(origin, c) <= thr) out.push_back(c);
  return out;
}

std::vector<Vec> candidates(const FinslerStructure& s, const Vec& z, double tol) {
  const int m = static_cast<int>(s.lattice().size());
  if (m == 0) return {z};
  if (m == 1) return rank_one_candidates(s, z, tol);
  if (m == s.dim()) return full_rank_candidates(s, z, tol);
  throw DomainError("flat quotient: lattices of rank strictly between 1 and n are not supported");
}

}  // namespace

Vec flat_min_displacement(const FinslerStructure& s, const Vec& z) {
  const Vec origin(s.dim());
  Vec best;
  double fbest = std::numeric_limits<double>::infinity();
  for (const Vec& c : candidates(s, z, 0.0)) {
    const double f = s.norm(origin, c);
    if (f < fbest) {
      fbest = f;
      best = c;
    }
  }
  return best;
}

std::vector<Vec> flat_near_min_displacements(const FinslerStructure& s, const Vec& z, double tol) {
  return candidates(s, z, tol);
}

std::vector<Vec> relevant_translations(const FinslerStructure& s) {
  const int n = s.dim();
  const auto& lat = s.lattice();
  const int m = static_cast<int>(lat.size());
  if (m == 0) return {};
  if (m == 1) return {lat[0], Vec(-lat[0])};
  if (m != n) throw DomainError("flat quotient: lattices of rank strictly between 1 and n are not supported");
  const Vec origin(n);
  // F is convex, so its maximum over the fundamental parallelotope sits at a corner.
  double cell = 0.0;
  for (int mask = 0; mask < (1 << m); ++mask) {
    Vec c(n);
    for (int j = 0; j < m; ++j) c = c + ((mask >> j) & 1 ? 0.5 : -0.5) * lat[j];
    cell = std::max(cell, s.norm(origin, c));
  }
  const Distortion dist = distortion(s);
  std::vector<Vec> out;
  for (const Vec& k : translations_within(s, (1.0 + dist.rho) * cell, dist))
    if (euclidean_norm(k) > 0.0) out.push_back(k);
  return out;
}

double flat_cut_time(const FinslerStructure& s, const Vec& u, const std::vector<Vec>& relevant) {
  const Vec origin(s.dim());
  double cut = std::numeric_limits<double>::infinity();
  for (const Vec& k : relevant) {
    // φ(t) = F(t u + k) − t is non-increasing with limit dF_u(k).
    const double slope = s.norm(constant(origin), seeded(u, k)).eps;
    if (slope >= 0.0) continue;
    auto phi = [&](double t) { return s.norm(origin, t * u + k) - t; };
    double lo = 0.0;
    double hi = std::max(1e-12, s.norm(origin, k));
    bool beyond = false;
    while (phi(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (lo >= cut) {
        beyond = true;
        break;
      }
    }
    if (beyond) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    cut = std::min(cut, 0.5 * (lo + hi));
  }
  return cut;
}

}  // namespace finsler::detail
