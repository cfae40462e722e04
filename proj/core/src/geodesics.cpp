#include "finsler/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "finsler/detail/derivatives.hpp"
#include "finsler/detail/flat.hpp"
#include "finsler/errors.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

namespace odeint = boost::numeric::odeint;

namespace {

struct OutsideDomain {};

using State = std::vector<double>;

bool is_zero(const Vec& v) {
  for (double c : v)
    if (c != 0.0) return false;
  return true;
}

bool finite(const Vec& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

void require_dim(const FinslerStructure& s, const Vec& v, const char* what) {
  if (v.size() != s.dim()) throw DomainError(std::string(what) + ": vector has the wrong dimension");
}

/// Directions used to seed searches: equispaced angles in the plane, offset
/// from the axes by `phase` cells.
std::vector<Vec> start_directions(int n, int count, std::uint64_t seed, double phase = 0.5) {
  if (n != 2) return sample_directions(n, count, seed);
  std::vector<Vec> out;
  for (int j = 0; j < count; ++j) {
    const double th = 2.0 * std::numbers::pi * (j + phase) / count;
    out.push_back(Vec{std::cos(th), std::sin(th)});
  }
  return out;
}

double point_segment_distance(const Vec& q, const Vec& a, const Vec& b, double& frac) {
  const Vec ab = b - a;
  const double len2 = dot(ab, ab);
  frac = len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
  return euclidean_norm(q - (a + frac * ab));
}

/// F-length of the chart segment from p to q (an upper bound on d(p, q)).
double segment_length(const FinslerStructure& s, const Vec& p, const Vec& q) {
  static constexpr double kNodes[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                      0.7966664774136267,  0.9602898564975363};
  static constexpr double kWeights[] = {0.1012285362903763, 0.2223810344533745, 0.3137066638343881,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066638343881,
                                        0.2223810344533745, 0.1012285362903763};
  const Vec d = q - p;
  double len = 0.0;
  for (int i = 0; i < 8; ++i) {
    const Vec x = p + (0.5 * (kNodes[i] + 1.0)) * d;
    if (!s.in_domain(x)) return std::numeric_limits<double>::infinity();
    len += 0.5 * kWeights[i] * s.norm(x, d);
  }
  return len;
}

struct Solution {
  Vec u;  ///< initial velocity reaching q at time 1
  double length;
};

class Shooter {
 public:
  Shooter(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts)
      : s_(s), p_(p), q_(q), opts_(opts), tol_(opts.tol * std::max(1.0, euclidean_norm(q))) {
    screen_opts_ = opts.geodesic;
    screen_opts_.abs_tol = std::max(opts.geodesic.abs_tol, 1e-9);
    screen_opts_.rel_tol = std::max(opts.geodesic.rel_tol, 1e-9);
    screen_opts_.drift_tol = 1e-4;
    bound_ = segment_length(s, p, q);
    if (!std::isfinite(bound_)) bound_ = 4.0 * s.norm(p, q - p) + 1.0;
  }

  [[nodiscard]] double upper_bound() const { return bound_; }

  /// Closest approach to q along the unit-speed geodesic in direction dir.
  std::pair<double, Vec> screen(const Vec& dir) const {
    const Vec u = dir / s_.norm(p_, dir);
    try {
      const GeodesicPath path = integrate_geodesic(s_, p_, u, 1.02 * bound_, screen_opts_);
      double best = std::numeric_limits<double>::infinity();
      double t_best = 0.0;
      for (size_t k = 1; k < path.points.size(); ++k) {
        double frac = 0.0;
        const double miss = point_segment_distance(q_, path.points[k - 1], path.points[k], frac);
        if (miss < best) {
          best = miss;
          t_best = path.times[k - 1] + frac * (path.times[k] - path.times[k - 1]);
        }
      }
      return {best, std::max(t_best, 1e-12) * u};
    } catch (const Error&) {
      return {std::numeric_limits<double>::infinity(), u};
    }
  }

  std::optional<Solution> newton(Vec u) const {
    const int n = s_.dim();
    Vec r;
    if (!residual(u, r)) return std::nullopt;
    double nr = euclidean_norm(r);
    for (int iter = 0; iter < 40; ++iter) {
      if (nr <= tol_) return Solution{u, s_.norm(p_, u)};
      Mat jac(n);
      const double h = 1e-6 * std::max(euclidean_norm(u), 1e-3);
      for (int j = 0; j < n; ++j) {
        Vec up = u;
        Vec um = u;
        up[j] += h;
        um[j] -= h;
        Vec rp;
        Vec rm;
        if (!residual(up, rp) || !residual(um, rm)) return std::nullopt;
        for (int i = 0; i < n; ++i) jac(i, j) = (rp[i] - rm[i]) / (2.0 * h);
      }
      Vec step;
      try {
        step = solve(jac, r);
      } catch (const std::domain_error&) {
        return std::nullopt;
      }
      double lambda = 1.0;
      bool moved = false;
      while (lambda > 1e-4) {
        const Vec trial = u - lambda * step;
        Vec rt;
        if (residual(trial, rt) && euclidean_norm(rt) < nr) {
          u = trial;
          r = rt;
          nr = euclidean_norm(rt);
          moved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved) return nr <= tol_ ? std::optional<Solution>(Solution{u, s_.norm(p_, u)}) : std::nullopt;
    }
    if (nr <= tol_) return Solution{u, s_.norm(p_, u)};
    return std::nullopt;
  }

  std::vector<Solution> all(int refine) const {
    const auto dirs = start_directions(s_.dim(), opts_.starts, 977);
    std::vector<std::pair<double, Vec>> screened;
    for (const Vec& d : dirs) screened.push_back(screen(d));
    std::vector<size_t> order(screened.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return screened[a].first < screened[b].first; });
    std::vector<Solution> out;
    for (int k = 0; k < std::min<int>(refine, static_cast<int>(order.size())); ++k) {
      const auto& cand = screened[order[k]];
      if (!std::isfinite(cand.first)) break;
      if (auto sol = newton(cand.second)) out.push_back(*sol);
    }
    return out;
  }

 private:
  bool residual(const Vec& u, Vec& r) const {
    try {
      const GeodesicPath path = integrate_geodesic(s_, p_, u, 1.0, opts_.geodesic);
      if (path.truncated) return false;
      r = path.end() - q_;
      return finite(r);
    } catch (const Error&) {
      return false;
    }
  }

  const FinslerStructure& s_;
  Vec p_;
  Vec q_;
  DistanceOptions opts_;
  GeodesicOptions screen_opts_;
  double tol_;
  double bound_;
};

DistanceResult from_solution(const FinslerStructure& s, const Vec& p, const Vec& q, const Solution& sol,
                             const GeodesicOptions& opts) {
  DistanceResult r;
  r.value = sol.length;
  r.converged = true;
  r.initial_velocity = sol.u / sol.length;
  const GeodesicPath path = integrate_geodesic(s, p, sol.u, 1.0, opts);
  r.terminal_velocity = path.velocities.back() / s.norm(path.end(), path.velocities.back());
  r.target = q;
  return r;
}

}  // namespace

GeodesicPath integrate_geodesic(const FinslerStructure& s, const Vec& x0, const Vec& y0, double t_end,
                                const GeodesicOptions& opts) {
  const int n = s.dim();
  require_dim(s, x0, "integrate_geodesic");
  require_dim(s, y0, "integrate_geodesic");
  if (is_zero(y0)) throw DegenerateError("integrate_geodesic: initial velocity is zero");
  if (!s.in_domain(x0)) throw DomainError("integrate_geodesic: start point outside the chart domain");
  if (!std::isfinite(t_end)) throw DomainError("integrate_geodesic: end time is not finite");

  GeodesicPath path;
  path.speed = s.norm(x0, y0);
  path.times.push_back(0.0);
  path.points.push_back(x0);
  path.velocities.push_back(y0);
  if (t_end == 0.0) return path;

  auto system = [&](const State& z, State& dz, double /*t*/) {
    Vec x(n);
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = z[i];
      v[i] = z[n + i];
    }
    if (!finite(x) || !s.in_domain(x)) throw OutsideDomain{};
    Vec g;
    try {
      g = detail::spray(s, x, v);
    } catch (const std::domain_error&) {
      throw OutsideDomain{};
    }
    for (int i = 0; i < n; ++i) {
      dz[i] = v[i];
      dz[n + i] = -2.0 * g[i];
      if (!std::isfinite(dz[n + i])) throw OutsideDomain{};
    }
  };

  State z(2 * n);
  for (int i = 0; i < n; ++i) {
    z[i] = x0[i];
    z[n + i] = y0[i];
  }
  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dir = t_end > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t_end);
  double t = 0.0;
  double dt = dir * std::min(span, 1e-2 * std::max(1.0, euclidean_norm(x0)) / euclidean_norm(y0));
  const double tiny = 1e-13 * std::max(1.0, span);
  long steps = 0;
  while (dir * (t_end - t) > 1e-15 * std::max(1.0, span)) {
    if (++steps > opts.max_steps) throw ConvergenceError("integrate_geodesic: step budget exhausted");
    const double remaining = t_end - t;
    double h = std::abs(dt) < std::abs(remaining) ? dt : remaining;
    const bool last = h == remaining;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(system, z, t, h);
    } catch (const OutsideDomain&) {
      dt = 0.5 * h;
      if (std::abs(dt) < tiny) {
        path.truncated = true;
        break;
      }
      continue;
    }
    if (res == odeint::fail) {
      dt = h;
      if (std::abs(dt) < tiny) throw ConvergenceError("integrate_geodesic: step size collapsed");
      continue;
    }
    if (last) t = t_end;
    dt = h;
    Vec x(n);
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = z[i];
      v[i] = z[n + i];
    }
    if (!s.in_domain(x)) {
      path.truncated = true;
      break;
    }
    const double speed = s.norm(x, v);
    path.speed_drift = std::max(path.speed_drift, std::abs(speed - path.speed));
    if (path.speed_drift > opts.drift_tol * path.speed) {
      std::ostringstream msg;
      msg << "integrate_geodesic: speed drift " << path.speed_drift << " exceeds " << opts.drift_tol
          << " of the initial speed";
      throw ConvergenceError(msg.str());
    }
    path.times.push_back(t);
    path.points.push_back(x);
    path.velocities.push_back(v);
  }
  return path;
}

Vec exp_map(const FinslerStructure& s, const Vec& p, const Vec& y, double t, const GeodesicOptions& opts) {
  require_dim(s, p, "exp_map");
  require_dim(s, y, "exp_map");
  if (t == 0.0 || is_zero(y)) return p;
  if (s.traits().translation_invariant) return p + t * y;
  const GeodesicPath path = integrate_geodesic(s, p, y, t, opts);
  if (path.truncated) throw DomainError("exp_map: geodesic leaves the chart domain");
  return path.end();
}

TangentVector geodesic_state(const FinslerStructure& s, const GeodesicPath& path, double t,
                             const GeodesicOptions& opts) {
  if (path.times.empty()) throw DomainError("geodesic_state: empty path");
  if (s.traits().translation_invariant) return {path.start() + t * path.velocities.front(), path.velocities.front()};
  size_t k = 0;
  for (size_t i = 1; i < path.times.size(); ++i)
    if (std::abs(path.times[i] - t) < std::abs(path.times[k] - t)) k = i;
  const double dt = t - path.times[k];
  if (dt == 0.0) return {path.points[k], path.velocities[k]};
  const GeodesicPath piece = integrate_geodesic(s, path.points[k], path.velocities[k], dt, opts);
  if (piece.truncated) throw DomainError("geodesic_state: geodesic leaves the chart domain");
  return {piece.end(), piece.velocities.back()};
}

void write_path_csv(std::ostream& out, const GeodesicPath& path) {
  const int n = path.points.empty() ? 0 : path.points.front().size();
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i + 1;
  for (int i = 0; i < n; ++i) out << ",v" << i + 1;
  out << "\n";
  out.precision(17);
  for (size_t k = 0; k < path.times.size(); ++k) {
    out << path.times[k];
    for (int i = 0; i < n; ++i) out << "," << path.points[k][i];
    for (int i = 0; i < n; ++i) out << "," << path.velocities[k][i];
    out << "\n";
  }
}

DistanceResult solve_distance(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts) {
  const int n = s.dim();
  require_dim(s, p, "distance");
  require_dim(s, q, "distance");
  if (!s.in_domain(p) || !s.in_domain(q)) throw DomainError("distance: point outside the chart domain");

  if (s.traits().translation_invariant) {
    const Vec z = detail::flat_min_displacement(s, q - p);
    DistanceResult r;
    r.converged = true;
    r.value = s.norm(p, z);
    r.target = p + z;
    if (r.value > 0.0) {
      r.initial_velocity = z / r.value;
      r.terminal_velocity = r.initial_velocity;
    } else {
      r.initial_velocity = Vec(n);
      r.terminal_velocity = Vec(n);
    }
    return r;
  }

  if (euclidean_norm(q - p) == 0.0) {
    DistanceResult r;
    r.converged = true;
    r.initial_velocity = Vec(n);
    r.terminal_velocity = Vec(n);
    r.target = q;
    return r;
  }

  const Shooter shooter(s, p, q, opts);
  if (opts.hint && !is_zero(*opts.hint)) {
    if (auto sol = shooter.newton(shooter.screen(*opts.hint).second)) return from_solution(s, p, q, *sol, opts.geodesic);
  }
  const auto sols = shooter.all(opts.refine);
  if (sols.empty()) {
    DistanceResult r;
    r.value = shooter.upper_bound();
    r.converged = false;
    r.target = q;
    r.initial_velocity = (q - p) / s.norm(p, q - p);
    r.terminal_velocity = r.initial_velocity;
    return r;
  }
  const auto best = std::min_element(sols.begin(), sols.end(),
                                     [](const Solution& a, const Solution& b) { return a.length < b.length; });
  return from_solution(s, p, q, *best, opts.geodesic);
}

double distance(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts) {
  const DistanceResult r = solve_distance(s, p, q, opts);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "distance: shooting did not converge; best upper bound " << r.value;
    throw ConvergenceError(msg.str());
  }
  return r.value;
}

double d_max(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts) {
  DistanceOptions back = opts;
  back.hint.reset();
  return std::max(distance(s, p, q, opts), distance(s, q, p, back));
}

TerminalVelocitySet terminal_velocities(const FinslerStructure& s, const Vec& p, const Vec& x, double tol,
                                        const DistanceOptions& opts) {
  TerminalVelocitySet out;
  out.from = p;
  out.at = x;
  out.tolerance = tol;
  if (euclidean_norm(x - p) == 0.0 && s.lattice().empty())
    throw DegenerateError("terminal_velocities: p and x coincide");

  std::vector<Vec> raw;
  if (s.traits().translation_invariant) {
    for (const Vec& z : detail::flat_near_min_displacements(s, x - p, tol)) {
      const double f = s.norm(p, z);
      if (f > 0.0) raw.push_back(z / f);
    }
  } else {
    const Shooter shooter(s, p, x, opts);
    const auto sols = shooter.all(std::max(opts.refine, 8));
    if (sols.empty()) throw ConvergenceError("terminal_velocities: no geodesic from p reaches x");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sol : sols) best = std::min(best, sol.length);
    for (const auto& sol : sols) {
      if (sol.length > (1.0 + tol) * best + 1e-12) continue;
      const GeodesicPath path = integrate_geodesic(s, p, sol.u, 1.0, opts.geodesic);
      const Vec& v = path.velocities.back();
      raw.push_back(v / s.norm(path.end(), v));
    }
  }
  for (const Vec& v : raw) {
    bool dup = false;
    for (const Vec& w : out.vectors) dup = dup || euclidean_norm(v - w) < 1e-5;
    if (!dup) out.vectors.push_back(v);
  }
  if (out.vectors.empty()) throw ConvergenceError("terminal_velocities: no minimal geodesic found");
  return out;
}

AngleMeasurement measure_angle(const FinslerStructure& s, const Vec& p, const GeodesicPath& along, double t,
                               AngleSense sense, const AngleOptions& opts) {
  const TangentVector st = geodesic_state(s, along, t, opts.distance.geodesic);
  const Vec& xb = st.base;
  const Vec v = st.fiber / s.norm(xb, st.fiber);
  const double h0 = opts.h0 > 0.0 ? opts.h0 : 1e-2 * (along.length() > 0.0 ? along.length() : 1.0);

  const DistanceResult base = solve_distance(s, p, xb, opts.distance);
  if (!base.converged) throw ConvergenceError("measure_angle: distance to the vertex did not converge");
  DistanceOptions toward_p = opts.distance;
  toward_p.hint = base.initial_velocity;
  DistanceOptions along_fwd = opts.distance;
  along_fwd.hint = v;
  DistanceOptions along_bwd = opts.distance;
  along_bwd.hint = Vec(-v);

  AngleMeasurement m;
  for (int j = 0; j < 4; ++j) {
    const double h = h0 / static_cast<double>(1 << j);
    double c = 0.0;
    if (sense == AngleSense::kForward) {
      const Vec xh = exp_map(s, xb, v, h, opts.distance.geodesic);
      const double dh = distance(s, p, xh, toward_p);
      const double dm = std::max(distance(s, xb, xh, along_fwd), distance(s, xh, xb, along_bwd));
      c = -(dh - base.value) / dm;
    } else {
      const Vec xh = exp_map(s, xb, v, -h, opts.distance.geodesic);
      const double dh = distance(s, p, xh, toward_p);
      const double dm = std::max(distance(s, xh, xb, along_fwd), distance(s, xb, xh, along_bwd));
      c = (base.value - dh) / dm;
    }
    m.steps.push_back(h);
    m.quotients.push_back(c);
  }

  // Neville table for an error expansion in powers of h with ratio 2.
  std::vector<std::vector<double>> table(4);
  for (int j = 0; j < 4; ++j) {
    table[j].push_back(m.quotients[j]);
    for (int k = 1; k <= j; ++k) {
      const double f = static_cast<double>(1 << k) - 1.0;
      table[j].push_back(table[j][k - 1] + (table[j][k - 1] - table[j - 1][k - 1]) / f);
    }
  }
  const double d1 = std::abs(m.quotients[1] - m.quotients[0]);
  const double d2 = std::abs(m.quotients[2] - m.quotients[1]);
  const double d3 = std::abs(m.quotients[3] - m.quotients[2]);
  if (d3 > 1e-8 && d3 > opts.cauchy_ratio * d2 && d2 > opts.cauchy_ratio * d1) {
    std::ostringstream msg;
    msg << "measure_angle: limit quotients do not settle (differences " << d1 << ", " << d2 << ", " << d3
        << "); the vertex is likely on the cut locus";
    throw NonSmoothError(msg.str());
  }
  m.cosine = std::clamp(table[3][3], -1.0, 1.0);
  m.extrapolation_error = std::abs(table[3][3] - table[2][2]);
  m.angle = std::acos(m.cosine);
  return m;
}

double first_variation_pairing(const FinslerStructure& s, const Vec& p, const Vec& x, const Vec& y, double tv_tol,
                               const DistanceOptions& opts) {
  const TerminalVelocitySet tv = terminal_velocities(s, p, x, tv_tol, opts);
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& w : tv.vectors) best = std::min(best, bilinear(detail::fundamental_matrix(s, x, w), y, w));
  return best;
}

double first_variation_angle(const FinslerStructure& s, const Vec& p, const Vec& x, const Vec& v, AngleSense sense,
                             double tv_tol, const DistanceOptions& opts) {
  if (is_zero(v)) throw DegenerateError("first_variation_angle: velocity is zero");
  const Vec y = sense == AngleSense::kForward ? v : Vec(-v);
  const double pairing = first_variation_pairing(s, p, x, y, tv_tol, opts);
  const double scale = std::max(s.norm(x, v), s.norm(x, Vec(-v)));
  return std::acos(std::clamp(-pairing / scale, -1.0, 1.0));
}

std::vector<Vec> RaySearch::rays() const {
  std::vector<Vec> out;
  for (size_t i = 0; i < directions.size(); ++i)
    if (is_ray[i]) out.push_back(directions[i]);
  return out;
}

RaySearch find_rays(const FinslerStructure& s, const Vec& p, double horizon, double tol, int resolution,
                    int t_samples, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw DomainError("find_rays: horizon must be positive");
  if (resolution < 1 || t_samples < 1) throw DomainError("find_rays: resolution and t_samples must be positive");
  RaySearch out;
  out.horizon = horizon;
  out.tol = tol;
  for (const Vec& d : start_directions(s.dim(), resolution, seed, 0.0)) out.directions.push_back(d / s.norm(p, d));
  out.is_ray.assign(out.directions.size(), 0);

  parallel_for(static_cast<int>(out.directions.size()), [&](int i) {
    const Vec& u = out.directions[i];
    bool ray = true;
    std::optional<GeodesicPath> path;
    if (!s.traits().translation_invariant) {
      try {
        path = integrate_geodesic(s, p, u, horizon);
        if (path->truncated) ray = false;
      } catch (const Error&) {
        ray = false;
      }
    }
    for (int k = 1; ray && k <= t_samples; ++k) {
      const double t = horizon * k / t_samples;
      try {
        const Vec x = path ? geodesic_state(s, *path, t).base : exp_map(s, p, u, t);
        const DistanceResult d = solve_distance(s, p, x);
        if (!d.converged || d.value < t * (1.0 - tol)) ray = false;
      } catch (const Error&) {
        ray = false;
      }
    }
    out.is_ray[i] = ray ? 1 : 0;
  });
  long count = 0;
  for (char r : out.is_ray) count += r;
  out.fraction = static_cast<double>(count) / static_cast<double>(out.is_ray.size());
  return out;
}

bool closed_geodesic_check(const FinslerStructure& s, const GeodesicPath& path, double tol) {
  if (path.points.size() < 2 || path.truncated || path.length() <= 0.0) return false;
  const Vec& x0 = path.start();
  const Vec xe = s.reduce(path.end(), x0);
  const double scale = std::max(1.0, euclidean_norm(x0));
  if (euclidean_norm(xe - x0) > tol * scale) return false;
  const Vec& v0 = path.velocities.front();
  const Vec& ve = path.velocities.back();
  return euclidean_norm(ve - v0) <= tol * euclidean_norm(v0);
}

std::optional<GeodesicPath> find_closed_geodesic(const FinslerStructure& s, const Vec& p, double horizon,
                                                 int directions, const GeodesicOptions& opts) {
  const int n = s.dim();
  if (s.traits().translation_invariant) {
    if (s.lattice().empty()) return std::nullopt;
    // The shortest nonzero translation is no longer than any generator.
    double bound = horizon;
    for (const Vec& w : s.lattice()) bound = std::min(bound, s.norm(p, w));
    Vec best;
    double fbest = std::numeric_limits<double>::infinity();
    const int coeff = 1 + static_cast<int>(std::ceil(bound / 1e-3));
    (void)coeff;
    for (const Vec& k : s.deck_translations(2)) {
      const double f = s.norm(p, k);
      if (f > 0.0 && f <= bound * (1.0 + 1e-12) && f < fbest) {
        fbest = f;
        best = k;
      }
    }
    if (best.size() != n) return std::nullopt;
    GeodesicPath path = integrate_geodesic(s, p, best / fbest, fbest, opts);
    if (closed_geodesic_check(s, path)) return path;
    return std::nullopt;
  }

  const auto dirs = start_directions(n, directions, 4242);
  std::vector<std::optional<GeodesicPath>> found(dirs.size());
  parallel_for(static_cast<int>(dirs.size()), [&](int j) {
    const Vec u = dirs[j] / s.norm(p, dirs[j]);
    GeodesicPath path;
    try {
      path = integrate_geodesic(s, p, u, horizon, opts);
    } catch (const Error&) {
      return;
    }
    const double scale = std::max(1.0, euclidean_norm(p));
    auto gap = [&](double t) {
      try {
        return euclidean_norm(geodesic_state(s, path, t, opts).base - p);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    for (size_t k = 1; k + 1 < path.points.size(); ++k) {
      const double g0 = euclidean_norm(path.points[k - 1] - p);
      const double g1 = euclidean_norm(path.points[k] - p);
      const double g2 = euclidean_norm(path.points[k + 1] - p);
      if (!(g1 <= g0 && g1 <= g2) || g1 > 0.1 * scale || path.times[k] < 1e-3 * horizon) continue;
      // Golden-section refinement of the return time.
      double a = path.times[k - 1];
      double b = path.times[k + 1];
      const double r = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - r * (b - a);
      double d = a + r * (b - a);
      double fc = gap(c);
      double fd = gap(d);
      for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - r * (b - a);
          fc = gap(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + r * (b - a);
          fd = gap(d);
        }
      }
      const double t_ret = 0.5 * (a + b);
      try {
        GeodesicPath loop = integrate_geodesic(s, p, u, t_ret, opts);
        if (closed_geodesic_check(s, loop)) {
          found[j] = std::move(loop);
          return;
        }
      } catch (const Error&) {
      }
    }
  });
  for (auto& f : found)
    if (f) return f;
  return std::nullopt;
}

TerminalLimitReport terminal_velocity_limit_probe(const FinslerStructure& s, const Vec& p, const Vec& y,
                                                  const std::vector<double>& times, const DistanceOptions& opts) {
  if (is_zero(y)) throw DegenerateError("terminal_velocity_limit_probe: direction is zero");
  const Vec u = y / s.norm(p, y);
  const Vec target = Vec(-u) / s.norm(p, Vec(-u));
  TerminalLimitReport rep;
  for (double t : times) {
    const Vec x = exp_map(s, p, u, t, opts.geodesic);
    const TerminalVelocitySet tv = terminal_velocities(s, x, p, 1e-6, opts);
    double h = 0.0;
    for (const Vec& w : tv.vectors) h = std::max(h, euclidean_norm(w - target));
    if (!rep.hausdorff.empty() && h > rep.hausdorff.back() + 1e-6) rep.non_increasing = false;
    rep.times.push_back(t);
    rep.hausdorff.push_back(h);
    rep.set_sizes.push_back(static_cast<int>(tv.vectors.size()));
  }
  return rep;
}

ForwardTriangle make_forward_triangle(const FinslerStructure& s, const Vec& p, const Vec& a, const Vec& b,
                                      const DistanceOptions& opts) {
  ForwardTriangle tri;
  tri.p = p;
  tri.a = a;
  tri.b = b;
  auto side = [&](const Vec& from, const Vec& to, GeodesicPath& path, double& len) {
    const DistanceResult d = solve_distance(s, from, to, opts);
    if (!d.converged) throw ConvergenceError("make_forward_triangle: a side did not converge");
    if (d.value == 0.0) throw DegenerateError("make_forward_triangle: coincident vertices");
    len = d.value;
    path = integrate_geodesic(s, from, d.initial_velocity, d.value, opts.geodesic);
  };
  side(p, a, tri.side_pa, tri.length_pa);
  side(p, b, tri.side_pb, tri.length_pb);
  side(a, b, tri.side_ab, tri.length_ab);
  return tri;
}

}  // namespace finsler
