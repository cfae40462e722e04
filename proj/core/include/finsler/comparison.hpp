#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/geodesics.hpp"
#include "finsler/structure.hpp"

namespace finsler {

/// Rotationally symmetric surface dt² + f(t)² dθ² with curvature G = −f″/f.
struct ModelSurface {
  enum class Kind { kConstant, kPolynomial, kTabulated };
  Kind kind = Kind::kConstant;
  double kappa = 0.0;               ///< constant-curvature models only
  std::vector<double> coefficients;  ///< polynomial models: f(t) = Σ c_k t^k
  double t_max = 0.0;               ///< f > 0 on (0, t_max); infinity when unbounded
  bool von_mangoldt = true;         ///< G non-increasing at the sampled radii
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  [[nodiscard]] double G(double t) const;
  [[nodiscard]] std::string describe() const;
};

/// f = s_κ.
ModelSurface make_model(double kappa);
/// f(t) = Σ c_k t^k; requires c_0 = 0 and c_1 = 1.
ModelSurface make_polynomial_model(const std::vector<double>& coefficients);
/// Clamped cubic spline through equally spaced samples f(k·h), k = 0..m, with
/// f′(0) = 1 and the end slope estimated from the last samples. Requires
/// f(0) = 0 and f > 0 afterwards.
ModelSurface make_tabulated_model(double h, const std::vector<double>& values);

/// Maximum |G − (−f″/f)| over interior sample radii, with f″ by central
/// differences of f. A self-consistency check on the model's evaluators.
double model_consistency_defect(const ModelSurface& m, int samples = 64);

struct ModelPoint {
  double t = 0.0;
  double theta = 0.0;
};

struct ModelGeodesic {
  double length = 0.0;
  double start_angle = 0.0;  ///< angle at the first point between the geodesic and the outward radial direction
  double end_angle = 0.0;    ///< same at the second point, for the arriving velocity
  bool through_pole = false;
};

/// Distance on the model together with the radial angles of a minimizer.
ModelGeodesic model_geodesic(const ModelSurface& m, const ModelPoint& a, const ModelPoint& b);
double model_distance(const ModelSurface& m, const ModelPoint& a, const ModelPoint& b);

struct ComparisonTriangle {
  double pole_angle = 0.0;
  double d_pa = 0.0;
  double d_pb = 0.0;
  double l_ab = 0.0;
  double angle_a = 0.0;  ///< ∠ã, between ã→õ and ã→b̃
  double angle_b = 0.0;  ///< ∠b̃, between b̃→õ and b̃→ã
  ModelPoint a;
  ModelPoint b;
};

/// Places ã = (d_pa, 0) and solves for b̃ = (d_pb, θ) at distance l_ab.
/// Throws DomainError when no θ ∈ [0, π] works.
ComparisonTriangle comparison_triangle(const ModelSurface& m, double d_pa, double d_pb, double l_ab);

struct RadialBoundReport {
  int samples = 0;
  double worst_margin = 0.0;  ///< min of K(x; radial, w) − G(d(p, x))
  Vec worst_point;
  bool holds = false;
};

/// K_x ≥ G(d(p, x)) on flags whose pole is the terminal velocity of a minimal
/// geodesic from p to x.
RadialBoundReport radial_bound_check(const FinslerStructure& s, const Vec& p, const ModelSurface& m,
                                     const SampleSpec& spec, double tol = 1e-6);

struct ConditionReport {
  bool i_applicable = false;
  std::string i_note;
  double rho = 0.0;
  double i_min_distance = 0.0;  ///< min d(p, c(s)) along the side
  bool i_holds = true;
  double ii_min_margin = 0.0;  ///< min (g_v(w,w) − F(w)²) / F(w)²
  bool ii_holds = true;
  double iii_max_tangential = 0.0;
  bool iii_holds = true;
  double iv_residual = 0.0;  ///< max |G(x, −ẋ) − G(x, ẋ)| · 2 / F(ẋ)² along the side
  bool iv_holds = true;
};

/// Diagnostics for the side c = a→b of a forward triangle, sampled at
/// `points` interior points with `directions` transverse vectors each.
ConditionReport condition_flags(const FinslerStructure& s, const ForwardTriangle& tri, const ModelSurface& m,
                                int points = 5, int directions = 8, double tol = 1e-6, std::uint64_t seed = 1);

struct ToponogovReport {
  double forward_angle_a = 0.0;   ///< →∠pab
  double backward_angle_b = 0.0;  ///< ←∠pba
  ComparisonTriangle model;
  double margin_a = 0.0;  ///< →∠a − ∠ã
  double margin_b = 0.0;  ///< ←∠b − ∠b̃
  bool holds = false;     ///< both margins ≥ −tol
  ConditionReport conditions;
};

ToponogovReport toponogov_check(const FinslerStructure& s, const ForwardTriangle& tri, const ModelSurface& m,
                                double tol = 1e-3, const AngleOptions& opts = {});

struct MonotonicityReport {
  std::vector<double> times;
  std::vector<double> side_lengths;    ///< arclength of σ|[0, t]
  std::vector<double> radial_lengths;  ///< d(p, σ(t))
  std::vector<double> angles;          ///< ∠p̃ãb̃_t
  int violations = 0;
  bool truncated = false;  ///< a comparison triangle failed to exist; later t dropped
  std::string note;
};

/// Comparison angle at ã for triangles (d(p, a), d(p, σ(t)), length σ|[0,t]).
MonotonicityReport angle_monotonicity_check(const FinslerStructure& s, const Vec& p, const GeodesicPath& sigma,
                                            const std::vector<double>& times, const ModelSurface& m,
                                            double tol = 1e-3, const DistanceOptions& opts = {});

struct TriangleSides {
  double d_p_first = 0.0;   ///< d(p, x) or d(p, y)
  double d_p_second = 0.0;  ///< d(p, y) or d(p, z)
  double base = 0.0;        ///< d(x, y) or d(y, z)
};

struct DoubleTriangleReport {
  ComparisonTriangle first;   ///< p̃x̃ỹ
  ComparisonTriangle second;  ///< p̃ỹz̃
  ComparisonTriangle summed;  ///< p̃ãb̃
  double angle_sum_at_y = 0.0;
  bool precondition = false;  ///< angle sum at ỹ ≤ π
  double margin_x = 0.0;      ///< ∠x̃ − ∠ã
  double margin_z = 0.0;      ///< ∠z̃ − ∠b̃
  bool holds = false;
};

DoubleTriangleReport double_triangle_check(const ModelSurface& m, const TriangleSides& first,
                                           const TriangleSides& second, double tol = 1e-6);

struct PerpendicularityReport {
  std::vector<double> times;
  std::vector<double> angles;  ///< →∠γ(t) a b
  std::vector<double> first_variation;  ///< same angle from the first variation formula
  double final_deviation = 0.0;         ///< |angle − π/2| at the largest t
  bool holds = false;
};

/// Forward angle at a = σ(0) between γ(t) and b = σ(s).
PerpendicularityReport ray_perpendicularity_probe(const FinslerStructure& s, const GeodesicPath& sigma,
                                                  const Vec& ray_direction, const std::vector<double>& times,
                                                  double tol = 0.05, const AngleOptions& opts = {});

struct HMapReport {
  std::vector<double> values;  ///< h(v) = g_v(σ̇(0), v) per ray direction
  double max_abs = 0.0;
  bool holds = false;
};

HMapReport h_map_check(const FinslerStructure& s, const GeodesicPath& sigma, const std::vector<Vec>& rays,
                       double tol = 0.02);

}  // namespace finsler
