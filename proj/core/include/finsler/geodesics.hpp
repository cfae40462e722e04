#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler {

struct GeodesicOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  double drift_tol = 1e-6;  ///< allowed |F(ẋ) − F(ẋ(0))| relative to the initial speed
  long max_steps = 2000000;
};

/// Solution of ẍ + 2G(x, ẋ) = 0 sampled at the accepted integrator steps.
/// `times` run from 0 toward the requested end (decreasing for backward runs).
struct GeodesicPath {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
  double speed = 0.0;        ///< F(x(0), ẋ(0))
  double speed_drift = 0.0;  ///< max_k |F(x, ẋ)(t_k) − speed|
  bool truncated = false;    ///< stopped early at the chart boundary

  [[nodiscard]] double duration() const { return times.empty() ? 0.0 : times.back(); }
  [[nodiscard]] double length() const { return speed * std::abs(duration()); }
  [[nodiscard]] const Vec& start() const { return points.front(); }
  [[nodiscard]] const Vec& end() const { return points.back(); }
};

/// Adaptive Dormand–Prince integration up to |t_end| (negative t_end runs the
/// same geodesic backward). Throws ConvergenceError on speed drift beyond
/// `drift_tol` or on step collapse away from the boundary; leaving the chart
/// domain returns the truncated path with `truncated` set.
GeodesicPath integrate_geodesic(const FinslerStructure& s, const Vec& x0, const Vec& y0, double t_end,
                                const GeodesicOptions& opts = {});

/// exp_p(t·y). On translation-invariant structures the spray vanishes and the
/// straight line is returned directly.
Vec exp_map(const FinslerStructure& s, const Vec& p, const Vec& y, double t = 1.0, const GeodesicOptions& opts = {});

/// Position and velocity of the geodesic `path` at time `t`.
TangentVector geodesic_state(const FinslerStructure& s, const GeodesicPath& path, double t,
                             const GeodesicOptions& opts = {});

/// CSV with columns t, x1..xn, v1..vn.
void write_path_csv(std::ostream& out, const GeodesicPath& path);

struct DistanceOptions {
  std::optional<Vec> hint;  ///< initial direction of a nearby minimal geodesic (warm start)
  int starts = 64;          ///< screened initial directions for multi-start shooting
  int refine = 4;           ///< best screened candidates refined by Gauss–Newton
  double tol = 1e-10;       ///< endpoint residual relative to max(1, |q|)
  GeodesicOptions geodesic;
};

struct DistanceResult {
  double value = 0.0;
  bool converged = false;  ///< false: `value` is only the best upper bound found
  Vec initial_velocity;    ///< unit (F = 1) velocity at p of the minimizer
  Vec terminal_velocity;   ///< unit velocity at q
  Vec target;              ///< lift of q reached in the chart (differs from q on quotients)
};

/// Forward distance d(p, q) with the minimizing geodesic. Flat structures use
/// the exact minimum of F(q − p + k) over deck translations k; curved charts
/// use multi-start shooting refined by Gauss–Newton on the endpoint map.
DistanceResult solve_distance(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts = {});

/// d(p, q); throws ConvergenceError (message carries the upper bound) if
/// shooting fails.
double distance(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts = {});

/// max{d(p, q), d(q, p)}.
double d_max(const FinslerStructure& s, const Vec& p, const Vec& q, const DistanceOptions& opts = {});

struct TerminalVelocitySet {
  std::vector<Vec> vectors;  ///< unit velocities at `at`
  Vec from;
  Vec at;
  double tolerance = 0.0;
};

/// Terminal velocities at x of geodesics from p whose length is within
/// (1 + tol)·d(p, x); clustered so each minimizer appears once.
TerminalVelocitySet terminal_velocities(const FinslerStructure& s, const Vec& p, const Vec& x, double tol = 1e-6,
                                        const DistanceOptions& opts = {});

enum class AngleSense { kForward, kBackward };

struct AngleOptions {
  double h0 = 0.0;  ///< first step; 0 means 1e-2 · path length
  double cauchy_ratio = 0.9;
  DistanceOptions distance;
};

struct AngleMeasurement {
  double angle = 0.0;  ///< in [0, π]
  double cosine = 0.0;
  std::vector<double> steps;
  std::vector<double> quotients;  ///< raw limit quotients, one per step
  double extrapolation_error = 0.0;
};

/// Forward angle ∠p b c (or backward ∠p b a) at b = path(t) from the one-sided
/// limit quotient of distances, Richardson-extrapolated over h0·{1, ½, ¼, ⅛}.
/// Throws NonSmoothError when the quotients do not settle.
AngleMeasurement measure_angle(const FinslerStructure& s, const Vec& p, const GeodesicPath& along, double t,
                               AngleSense sense, const AngleOptions& opts = {});

/// min over ω ∈ TV_p(x) of g_ω(y, ω).
double first_variation_pairing(const FinslerStructure& s, const Vec& p, const Vec& x, const Vec& y,
                               double tv_tol = 1e-6, const DistanceOptions& opts = {});

/// The angle predicted by the first variation formula for a curve leaving x
/// with velocity v (forward) or arriving with velocity v (backward); the
/// pairing is normalized by d_max, i.e. by max{F(v), F(−v)}.
double first_variation_angle(const FinslerStructure& s, const Vec& p, const Vec& x, const Vec& v, AngleSense sense,
                             double tv_tol = 1e-6, const DistanceOptions& opts = {});

struct RaySearch {
  std::vector<Vec> directions;  ///< all sampled unit (F = 1) directions
  std::vector<char> is_ray;     ///< per sampled direction
  double fraction = 0.0;        ///< share of sampled directions that are rays
  double horizon = 0.0;
  double tol = 0.0;

  [[nodiscard]] std::vector<Vec> rays() const;
};

/// Finite-horizon ray proxy: y is accepted when d(p, exp_p(t y)) ≥ t(1 − tol)
/// for the sampled t ≤ horizon. Directions are equispaced in angle from the x¹ axis for n = 2
/// and random (seeded) otherwise.
RaySearch find_rays(const FinslerStructure& s, const Vec& p, double horizon, double tol = 1e-3, int resolution = 720,
                    int t_samples = 8, std::uint64_t seed = 1);

/// Endpoint equals the start (modulo deck translations) and the terminal
/// velocity equals the initial one, both within tol relative to the scale.
bool closed_geodesic_check(const FinslerStructure& s, const GeodesicPath& path, double tol = 1e-6);

/// Search for a closed geodesic through p of length ≤ horizon. Flat quotients
/// enumerate deck translations; curved charts scan `directions` initial
/// directions for returns to p.
std::optional<GeodesicPath> find_closed_geodesic(const FinslerStructure& s, const Vec& p, double horizon,
                                                 int directions = 64, const GeodesicOptions& opts = {});

struct TerminalLimitReport {
  std::vector<double> times;
  std::vector<double> hausdorff;  ///< between TV_{γ(t)}(p) and {−γ̇(0)}
  std::vector<int> set_sizes;
  bool non_increasing = true;  ///< trendwise, within 1e-6
};

/// Along the ray t ↦ exp_p(t y), compare the terminal velocities at p of
/// minimal geodesics from γ(t) with −γ̇(0) (Euclidean chart distance between
/// unit vectors, Hausdorff over the set).
TerminalLimitReport terminal_velocity_limit_probe(const FinslerStructure& s, const Vec& p, const Vec& y,
                                                  const std::vector<double>& times, const DistanceOptions& opts = {});

struct ForwardTriangle {
  Vec p;
  Vec a;
  Vec b;
  GeodesicPath side_pa;
  GeodesicPath side_pb;
  GeodesicPath side_ab;
  double length_pa = 0.0;
  double length_pb = 0.0;
  double length_ab = 0.0;
};

/// Minimal forward sides p→a, p→b, a→b, each integrated at unit speed.
ForwardTriangle make_forward_triangle(const FinslerStructure& s, const Vec& p, const Vec& a, const Vec& b,
                                      const DistanceOptions& opts = {});

}  // namespace finsler
