#include "finsler/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cubic_b_spline.hpp>

#include "finsler/curvature.hpp"
#include "finsler/detail/derivatives.hpp"
#include "finsler/errors.hpp"
#include "finsler/measure.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

/// Angle difference folded into [0, π].
double fold(double dtheta) {
  double d = std::fmod(std::abs(dtheta), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

void mark_von_mangoldt(ModelSurface& m, double tol) {
  const double upper = std::isfinite(m.t_max) ? m.t_max : 10.0;
  double prev = kInf;
  m.von_mangoldt = true;
  for (int k = 1; k < 64; ++k) {
    const double g = m.G(upper * k / 64.0);
    if (g > prev + tol * std::max(1.0, std::abs(prev))) m.von_mangoldt = false;
    prev = g;
  }
}

/// Law of cosines in constant curvature κ: angle opposite `c` between sides a, b.
double constant_angle(double kappa, double a, double b, double c) {
  if (a == 0.0 || b == 0.0) return kPi / 2.0;
  if (kappa == 0.0) return std::acos(clamp_cos((a * a + b * b - c * c) / (2.0 * a * b)));
  const double k = std::sqrt(std::abs(kappa));
  if (kappa > 0.0)
    return std::acos(clamp_cos((std::cos(k * c) - std::cos(k * a) * std::cos(k * b)) /
                               (std::sin(k * a) * std::sin(k * b))));
  return std::acos(clamp_cos((std::cosh(k * a) * std::cosh(k * b) - std::cosh(k * c)) /
                             (std::sinh(k * a) * std::sinh(k * b))));
}

/// Side opposite the angle `gamma` between sides a, b.
double constant_side(double kappa, double a, double b, double gamma) {
  if (kappa == 0.0) return std::sqrt(std::max(0.0, a * a + b * b - 2.0 * a * b * std::cos(gamma)));
  const double k = std::sqrt(std::abs(kappa));
  if (kappa > 0.0)
    return std::acos(clamp_cos(std::cos(k * a) * std::cos(k * b) +
                               std::sin(k * a) * std::sin(k * b) * std::cos(gamma))) /
           k;
  return std::acosh(std::max(1.0, std::cosh(k * a) * std::cosh(k * b) -
                                      std::sinh(k * a) * std::sinh(k * b) * std::cos(gamma))) /
         k;
}

struct ClairautState {
  double t;
  double theta;
  double psi;  ///< angle from the outward radial direction
};

ClairautState clairaut_step(const ModelSurface& m, const ClairautState& y, double h) {
  auto rhs = [&](const ClairautState& z) {
    const double f = m.f(z.t);
    return ClairautState{std::cos(z.psi), std::sin(z.psi) / f, -m.df(z.t) * std::sin(z.psi) / f};
  };
  auto add = [](const ClairautState& a, const ClairautState& b, double s) {
    return ClairautState{a.t + s * b.t, a.theta + s * b.theta, a.psi + s * b.psi};
  };
  const ClairautState k1 = rhs(y);
  const ClairautState k2 = rhs(add(y, k1, 0.5 * h));
  const ClairautState k3 = rhs(add(y, k2, 0.5 * h));
  const ClairautState k4 = rhs(add(y, k3, h));
  return ClairautState{y.t + h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t),
                       y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
                       y.psi + h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi)};
}

struct Hit {
  bool ok = false;
  double t = 0.0;  ///< radius at the target argument, or where the shot gave up

  double length = 0.0;
  double psi = 0.0;
};

/// Follow the model geodesic from (t1, 0) leaving at angle α until its
/// argument reaches dtheta; give up past s_max or at the ends of (0, t_max).
Hit shoot(const ModelSurface& m, double t1, double alpha, double dtheta, double s_max) {
  ClairautState y{t1, 0.0, alpha};
  double s = 0.0;
  const double h0 = std::min(1e-2, s_max / 1000.0);
  while (s < s_max) {
    const double f = m.f(y.t);
    double h = std::min(h0, 0.05 * f / std::max(1.0, std::abs(m.df(y.t))));
    h = std::min(h, s_max - s);
    if (!(h > 1e-14)) return {false, y.t};
    const ClairautState next = clairaut_step(m, y, h);
    if (!(next.t > 0.0) || !std::isfinite(next.theta)) return {false, 0.0};
    if (next.t >= m.t_max) return {false, m.t_max};
    if (next.theta >= dtheta) {
      double lo = 0.0;
      double hi = h;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clairaut_step(m, y, mid).theta < dtheta ? lo : hi) = mid;
      }
      const ClairautState end = clairaut_step(m, y, hi);
      return {true, end.t, s + hi, end.psi};
    }
    y = next;
    s += h;
  }
  return {false, y.t};
}

}  // namespace

double ModelSurface::G(double t) const {
  if (kind == Kind::kConstant) return kappa;
  const double tt = std::max(t, 1e-6);
  return -d2f(tt) / f(tt);
}

std::string ModelSurface::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kConstant:
      out << "constant curvature " << kappa;
      break;
    case Kind::kPolynomial:
      out << "polynomial f of degree " << coefficients.size() - 1;
      break;
    case Kind::kTabulated:
      out << "tabulated f on [0, " << t_max << ")";
      break;
  }
  return out.str();
}

ModelSurface make_model(double kappa) {
  ModelSurface m;
  m.kind = ModelSurface::Kind::kConstant;
  m.kappa = kappa;
  const double k = std::sqrt(std::abs(kappa));
  if (kappa > 0.0) {
    m.t_max = kPi / k;
    m.f = [k](double t) { return std::sin(k * t) / k; };
    m.df = [k](double t) { return std::cos(k * t); };
    m.d2f = [k](double t) { return -k * std::sin(k * t); };
  } else if (kappa < 0.0) {
    m.t_max = kInf;
    m.f = [k](double t) { return std::sinh(k * t) / k; };
    m.df = [k](double t) { return std::cosh(k * t); };
    m.d2f = [k](double t) { return k * std::sinh(k * t); };
  } else {
    m.t_max = kInf;
    m.f = [](double t) { return t; };
    m.df = [](double) { return 1.0; };
    m.d2f = [](double) { return 0.0; };
  }
  m.von_mangoldt = true;
  return m;
}

ModelSurface make_polynomial_model(const std::vector<double>& c) {
  if (c.size() < 2 || c[0] != 0.0 || c[1] != 1.0)
    throw DomainError("make_model: polynomial f needs f(0) = 0 and f'(0) = 1");
  ModelSurface m;
  m.kind = ModelSurface::Kind::kPolynomial;
  m.coefficients = c;
  auto eval = [c](double t, int order) {
    double acc = 0.0;
    for (size_t k = c.size(); k-- > static_cast<size_t>(order);) {
      double fall = 1.0;
      for (int j = 0; j < order; ++j) fall *= static_cast<double>(k - j);
      acc = acc * t + c[k] * fall;
    }
    return acc;
  };
  m.f = [eval](double t) { return eval(t, 0); };
  m.df = [eval](double t) { return eval(t, 1); };
  m.d2f = [eval](double t) { return eval(t, 2); };
  // First positive root of f bounds the chart; scan outward.
  m.t_max = kInf;
  double prev = 1e-9;
  for (double t = 1e-3; t < 1e3; t *= 1.01) {
    if (!(m.f(t) > 0.0)) {
      double lo = prev;
      double hi = t;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (m.f(mid) > 0.0 ? lo : hi) = mid;
      }
      m.t_max = lo;
      break;
    }
    prev = t;
  }
  mark_von_mangoldt(m, 1e-9);
  return m;
}

ModelSurface make_tabulated_model(double h, const std::vector<double>& values) {
  if (!(h > 0.0) || values.size() < 5) throw DomainError("make_model: table needs h > 0 and at least 5 samples");
  if (std::abs(values[0]) > 1e-12) throw DomainError("make_model: table must start with f(0) = 0");
  for (size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > 0.0)) throw DomainError("make_model: tabulated f must be positive after 0");
  const size_t m_last = values.size() - 1;
  // Fourth-order one-sided difference; a cruder end slope shows up in G = −f″/f
  // where f is small.
  const double end_slope = (25.0 * values[m_last] - 48.0 * values[m_last - 1] + 36.0 * values[m_last - 2] -
                            16.0 * values[m_last - 3] + 3.0 * values[m_last - 4]) /
                           (12.0 * h);
  auto spline = std::make_shared<boost::math::cubic_b_spline<double>>(values.begin(), values.end(), 0.0, h, 1.0,
                                                                      end_slope);
  const double slope0 = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
  if (std::abs(slope0 - 1.0) > 1e-2) throw DomainError("make_model: tabulated f must have f'(0) = 1");
  ModelSurface m;
  m.kind = ModelSurface::Kind::kTabulated;
  m.t_max = h * static_cast<double>(m_last);
  m.f = [spline](double t) { return (*spline)(t); };
  m.df = [spline](double t) { return spline->prime(t); };
  m.d2f = [spline](double t) { return spline->double_prime(t); };
  // Spline second derivatives carry O(h²) noise.
  mark_von_mangoldt(m, 1e-3);
  return m;
}

double model_consistency_defect(const ModelSurface& m, int samples) {
  const double upper = std::isfinite(m.t_max) ? 0.95 * m.t_max : 5.0;
  double worst = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double t = upper * k / (samples + 1);
    const double h = 1e-4 * std::max(1.0, t);
    const double fd2 = (m.f(t + h) - 2.0 * m.f(t) + m.f(t - h)) / (h * h);
    worst = std::max(worst, std::abs(m.G(t) + fd2 / m.f(t)));
  }
  return worst;
}

ModelGeodesic model_geodesic(const ModelSurface& m, const ModelPoint& a, const ModelPoint& b) {
  if (!(a.t > 0.0) || !(b.t > 0.0)) throw DomainError("model_distance: radii must be positive");
  if (a.t >= m.t_max || b.t >= m.t_max) throw DomainError("model_distance: radius beyond the model's range");
  const double dtheta = fold(b.theta - a.theta);
  ModelGeodesic out;
  if (dtheta == 0.0) {
    out.length = std::abs(a.t - b.t);
    out.start_angle = b.t >= a.t ? 0.0 : kPi;
    out.end_angle = b.t >= a.t ? 0.0 : kPi;
    return out;
  }
  if (m.kind == ModelSurface::Kind::kConstant) {
    out.length = constant_side(m.kappa, a.t, b.t, dtheta);
    if (out.length == 0.0) return out;
    out.start_angle = kPi - constant_angle(m.kappa, a.t, out.length, b.t);
    out.end_angle = constant_angle(m.kappa, b.t, out.length, a.t);
    return out;
  }

  const double pole = a.t + b.t;
  out.length = pole;
  out.start_angle = kPi;
  out.end_angle = 0.0;
  out.through_pole = true;
  // Shots next to the root end farther out and run longer than the pole route,
  // so the scan budget is generous; only shorter solutions are kept.
  const double s_max = 4.0 * pole;
  // Interior samples plus sentinels: α = 0 runs radially outward and α = π
  // collapses onto the pole, so roots near either end are still bracketed.
  const int scan = 50;
  std::vector<Hit> hits(scan);
  std::vector<double> alphas(scan);
  alphas.front() = 0.0;
  hits.front() = {false, m.t_max};
  alphas.back() = kPi;
  hits.back() = {false, 0.0};
  for (int k = 1; k + 1 < scan; ++k) {
    alphas[k] = (k - 0.5) * kPi / (scan - 2);
    hits[k] = shoot(m, a.t, alphas[k], dtheta, s_max);
  }
  auto consider = [&](const Hit& h, double alpha) {
    if (h.ok && std::abs(h.t - b.t) <= 1e-9 * std::max(1.0, b.t) && h.length < out.length) {
      out.length = h.length;
      out.start_angle = alpha;
      out.end_angle = h.psi;
      out.through_pole = false;
    }
  };
  // Failed shots still carry a sign: escaping outward reads as overshooting b,
  // falling into the pole as undershooting. Successful shots are often too
  // sparse to bracket the root on their own.
  for (int k = 0; k + 1 < scan; ++k) {
    const double g0 = hits[k].t - b.t;
    const double g1 = hits[k + 1].t - b.t;
    if (g0 * g1 > 0.0) continue;
    double lo = alphas[k];
    double hi = alphas[k + 1];
    double glo = g0;
    const bool first = hits[k].ok && (!hits[k + 1].ok || std::abs(g0) < std::abs(g1));
    Hit best = first ? hits[k] : hits[k + 1];
    double best_alpha = first ? lo : hi;
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Hit hm = shoot(m, a.t, mid, dtheta, s_max);
      const double gm = hm.t - b.t;
      if (hm.ok && (!best.ok || std::abs(gm) < std::abs(best.t - b.t))) {
        best = hm;
        best_alpha = mid;
      }
      if (gm * glo > 0.0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    consider(best, best_alpha);
  }
  return out;
}

double model_distance(const ModelSurface& m, const ModelPoint& a, const ModelPoint& b) {
  return model_geodesic(m, a, b).length;
}

ComparisonTriangle comparison_triangle(const ModelSurface& m, double d_pa, double d_pb, double l_ab) {
  if (!(d_pa > 0.0) || !(d_pb > 0.0) || !(l_ab > 0.0))
    throw DomainError("comparison_triangle: side lengths must be positive");
  const double slack = 1e-12 * (d_pa + d_pb + l_ab);
  if (l_ab > d_pa + d_pb + slack || l_ab < std::abs(d_pa - d_pb) - slack)
    throw DomainError("comparison_triangle: sides violate the triangle inequality; no comparison triangle");
  ComparisonTriangle tri;
  tri.d_pa = d_pa;
  tri.d_pb = d_pb;
  tri.l_ab = l_ab;
  tri.a = {d_pa, 0.0};
  if (m.kind == ModelSurface::Kind::kConstant) {
    if (m.kappa > 0.0 && (d_pa >= m.t_max || d_pb >= m.t_max || d_pa + d_pb + l_ab > 2.0 * m.t_max + slack))
      throw DomainError("comparison_triangle: triangle too large for the constant-curvature model");
    tri.pole_angle = constant_angle(m.kappa, d_pa, d_pb, l_ab);
    tri.b = {d_pb, tri.pole_angle};
    tri.angle_a = constant_angle(m.kappa, d_pa, l_ab, d_pb);
    tri.angle_b = constant_angle(m.kappa, d_pb, l_ab, d_pa);
    return tri;
  }
  auto dist_at = [&](double theta) { return model_distance(m, tri.a, {d_pb, theta}); };
  // Sampled monotonicity guard.
  double prev = -kInf;
  for (int k = 0; k <= 16; ++k) {
    const double d = dist_at(kPi * k / 16.0);
    if (d < prev - 1e-9 * std::max(1.0, prev))
      throw DomainError("comparison_triangle: model distance is not monotone in the pole angle");
    prev = d;
  }
  if (l_ab > dist_at(kPi) + 1e-9 * l_ab)
    throw DomainError("comparison_triangle: side ab is longer than any model segment; no comparison triangle");
  double lo = 0.0;
  double hi = kPi;
  for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dist_at(mid) < l_ab ? lo : hi) = mid;
  }
  tri.pole_angle = 0.5 * (lo + hi);
  tri.b = {d_pb, tri.pole_angle};
  const ModelGeodesic g = model_geodesic(m, tri.a, tri.b);
  tri.angle_a = kPi - g.start_angle;
  tri.angle_b = g.end_angle;
  return tri;
}

RadialBoundReport radial_bound_check(const FinslerStructure& s, const Vec& p, const ModelSurface& m,
                                     const SampleSpec& spec, double tol) {
  const int n = s.dim();
  RadialBoundReport rep;
  rep.worst_margin = kInf;
  const auto points = sample_points(s, spec);
  const auto dirs = sample_directions(n, spec.directions, spec.seed + 5);
  std::vector<double> margin(points.size(), kInf);
  parallel_for(static_cast<int>(points.size()), [&](int i) {
    const Vec& x = points[i];
    if (euclidean_norm(x - p) < 1e-6) return;
    const DistanceResult d = solve_distance(s, p, x);
    if (!d.converged || d.value == 0.0) return;
    for (const Vec& w : dirs) {
      try {
        const double k = flag_curvature(s, {x, d.terminal_velocity, w});
        margin[i] = std::min(margin[i], k - m.G(d.value));
      } catch (const DegenerateError&) {
      }
    }
  });
  for (size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(margin[i])) continue;
    ++rep.samples;
    if (margin[i] < rep.worst_margin) {
      rep.worst_margin = margin[i];
      rep.worst_point = points[i];
    }
  }
  rep.holds = rep.samples > 0 && rep.worst_margin >= -tol;
  return rep;
}

ConditionReport condition_flags(const FinslerStructure& s, const ForwardTriangle& tri, const ModelSurface& m,
                                int points, int directions, double tol, std::uint64_t seed) {
  const int n = s.dim();
  ConditionReport rep;
  const GeodesicPath& c = tri.side_ab;
  const double len = c.duration();

  // (i) needs the unique zero ρ of f′.
  if (m.kind == ModelSurface::Kind::kConstant) {
    if (m.kappa > 0.0) {
      rep.i_applicable = true;
      rep.rho = kPi / (2.0 * std::sqrt(m.kappa));
    } else {
      rep.i_note = m.kappa == 0.0 ? "not applicable: f' = 1 never vanishes" : "not applicable: f' never vanishes";
    }
  } else {
    const double upper = std::isfinite(m.t_max) ? m.t_max : 50.0;
    std::vector<double> roots;
    const int grid = 2000;
    for (int k = 0; k < grid; ++k) {
      double lo = upper * k / grid;
      double hi = upper * (k + 1) / grid;
      if (m.df(lo) * m.df(hi) > 0.0) continue;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (m.df(lo) * m.df(mid) > 0.0 ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    if (roots.size() == 1) {
      rep.i_applicable = true;
      rep.rho = roots.front();
    } else {
      rep.i_note = roots.empty() ? "not applicable: f' never vanishes" : "not applicable: f' vanishes more than once";
    }
  }

  std::vector<double> times;
  for (int k = 0; k <= points + 1; ++k) times.push_back(len * k / (points + 1));
  const auto dirs = sample_directions(n, directions, seed);
  rep.i_min_distance = kInf;
  rep.ii_min_margin = kInf;
  for (size_t k = 0; k < times.size(); ++k) {
    const TangentVector st = geodesic_state(s, c, times[k]);
    const Vec& z = st.base;
    const double dz = distance(s, tri.p, z);
    rep.i_min_distance = std::min(rep.i_min_distance, dz);
    const double fv = s.norm(z, st.fiber);
    const Vec g_fwd = detail::spray(s, z, st.fiber);
    const Vec g_bwd = detail::spray(s, z, Vec(-st.fiber));
    rep.iv_residual = std::max(rep.iv_residual, 2.0 * euclidean_norm(g_bwd - g_fwd) / (fv * fv));
    if (k == 0 || k + 1 == times.size() || dz == 0.0) continue;
    const TerminalVelocitySet tv = terminal_velocities(s, tri.p, z);
    for (const Vec& v : tv.vectors) {
      const Mat g = detail::fundamental_matrix(s, z, v);
      for (const Vec& w : dirs) {
        const double fw = s.norm(z, w);
        rep.ii_min_margin = std::min(rep.ii_min_margin, (bilinear(g, w, w) - fw * fw) / (fw * fw));
        rep.iii_max_tangential =
            std::max(rep.iii_max_tangential, std::abs(tangential_curvature(s, z, v, w / fw)));
      }
    }
  }
  if (!std::isfinite(rep.ii_min_margin)) rep.ii_min_margin = 0.0;
  rep.i_holds = !rep.i_applicable || rep.i_min_distance > rep.rho;
  rep.ii_holds = rep.ii_min_margin >= -tol;
  rep.iii_holds = rep.iii_max_tangential <= tol;
  rep.iv_holds = rep.iv_residual <= tol;
  return rep;
}

ToponogovReport toponogov_check(const FinslerStructure& s, const ForwardTriangle& tri, const ModelSurface& m,
                                double tol, const AngleOptions& opts) {
  ToponogovReport rep;
  rep.model = comparison_triangle(m, tri.length_pa, tri.length_pb, tri.length_ab);
  const GeodesicPath& c = tri.side_ab;
  rep.forward_angle_a = measure_angle(s, tri.p, c, 0.0, AngleSense::kForward, opts).angle;
  rep.backward_angle_b = measure_angle(s, tri.p, c, c.duration(), AngleSense::kBackward, opts).angle;
  rep.margin_a = rep.forward_angle_a - rep.model.angle_a;
  rep.margin_b = rep.backward_angle_b - rep.model.angle_b;
  rep.holds = rep.margin_a >= -tol && rep.margin_b >= -tol;
  rep.conditions = condition_flags(s, tri, m);
  return rep;
}

MonotonicityReport angle_monotonicity_check(const FinslerStructure& s, const Vec& p, const GeodesicPath& sigma,
                                            const std::vector<double>& times, const ModelSurface& m, double tol,
                                            const DistanceOptions& opts) {
  MonotonicityReport rep;
  const Vec& a = sigma.start();
  const double d_pa = distance(s, p, a, opts);
  std::vector<double> radial(times.size(), 0.0);
  parallel_for(static_cast<int>(times.size()), [&](int k) {
    const Vec b = geodesic_state(s, sigma, times[k], opts.geodesic).base;
    radial[k] = distance(s, p, b, opts);
  });
  for (size_t k = 0; k < times.size(); ++k) {
    const double len = sigma.speed * times[k];
    try {
      const ComparisonTriangle tri = comparison_triangle(m, d_pa, radial[k], len);
      if (!rep.angles.empty() && tri.angle_a > rep.angles.back() + tol) ++rep.violations;
      rep.times.push_back(times[k]);
      rep.side_lengths.push_back(len);
      rep.radial_lengths.push_back(radial[k]);
      rep.angles.push_back(tri.angle_a);
    } catch (const DomainError& e) {
      rep.truncated = true;
      rep.note = e.what();
      break;
    }
  }
  return rep;
}

DoubleTriangleReport double_triangle_check(const ModelSurface& m, const TriangleSides& first,
                                           const TriangleSides& second, double tol) {
  if (std::abs(first.d_p_second - second.d_p_first) > 1e-9 * std::max(1.0, first.d_p_second))
    throw DomainError("double_triangle_check: the triangles must share the side p-y");
  DoubleTriangleReport rep;
  rep.first = comparison_triangle(m, first.d_p_first, first.d_p_second, first.base);
  rep.second = comparison_triangle(m, second.d_p_first, second.d_p_second, second.base);
  // ∠p̃ỹx̃ is the far angle of the first triangle, ∠p̃ỹz̃ the near angle of the second.
  rep.angle_sum_at_y = rep.first.angle_b + rep.second.angle_a;
  rep.precondition = rep.angle_sum_at_y <= kPi + tol;
  rep.summed = comparison_triangle(m, first.d_p_first, second.d_p_second, first.base + second.base);
  rep.margin_x = rep.first.angle_a - rep.summed.angle_a;
  rep.margin_z = rep.second.angle_b - rep.summed.angle_b;
  rep.holds = rep.precondition && rep.margin_x >= -tol && rep.margin_z >= -tol;
  return rep;
}

PerpendicularityReport ray_perpendicularity_probe(const FinslerStructure& s, const GeodesicPath& sigma,
                                                  const Vec& ray_direction, const std::vector<double>& times,
                                                  double tol, const AngleOptions& opts) {
  if (!s.traits().reversible) throw HypothesisError("ray_perpendicularity_probe: the structure must be reversible");
  if (!closed_geodesic_check(s, sigma)) throw HypothesisError("ray_perpendicularity_probe: sigma is not closed");
  if (times.empty()) throw DomainError("ray_perpendicularity_probe: empty time schedule");
  PerpendicularityReport rep;
  const Vec& a = sigma.start();
  const Vec u = ray_direction / s.norm(a, ray_direction);
  rep.times = times;
  rep.angles.assign(times.size(), 0.0);
  rep.first_variation.assign(times.size(), 0.0);
  parallel_for(static_cast<int>(times.size()), [&](int k) {
    const Vec q = exp_map(s, a, u, times[k], opts.distance.geodesic);
    rep.angles[k] = measure_angle(s, q, sigma, 0.0, AngleSense::kForward, opts).angle;
    rep.first_variation[k] =
        first_variation_angle(s, q, a, sigma.velocities.front(), AngleSense::kForward, 1e-6, opts.distance);
  });
  rep.final_deviation = std::abs(rep.angles.back() - kPi / 2.0);
  rep.holds = rep.final_deviation <= tol;
  return rep;
}

HMapReport h_map_check(const FinslerStructure& s, const GeodesicPath& sigma, const std::vector<Vec>& rays,
                       double tol) {
  HMapReport rep;
  const Vec& a = sigma.start();
  const Vec sdot = sigma.velocities.front() / s.norm(a, sigma.velocities.front());
  for (const Vec& v : rays) {
    const Vec vu = v / s.norm(a, v);
    const double h = bilinear(detail::fundamental_matrix(s, a, vu), sdot, vu);
    rep.values.push_back(h);
    rep.max_abs = std::max(rep.max_abs, std::abs(h));
  }
  rep.holds = rep.max_abs <= tol;
  return rep;
}

}  // namespace finsler
