#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "finsler/comparison.hpp"
#include "finsler/errors.hpp"
#include "finsler/fixtures.hpp"
#include "finsler/geodesics.hpp"
#include "support.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

// Angle at the vertex between sides b and c in a constant-curvature triangle,
// from the law of cosines written out per sign of κ.
double law_of_cosines(double kappa, double a, double b, double c) {
  if (kappa == 0.0) return std::acos((b * b + c * c - a * a) / (2 * b * c));
  if (kappa > 0.0) {
    const double k = std::sqrt(kappa);
    return std::acos((std::cos(k * a) - std::cos(k * b) * std::cos(k * c)) / (std::sin(k * b) * std::sin(k * c)));
  }
  const double k = std::sqrt(-kappa);
  return std::acos((std::cosh(k * b) * std::cosh(k * c) - std::cosh(k * a)) / (std::sinh(k * b) * std::sinh(k * c)));
}

}  // namespace

TEST_CASE("model surfaces") {
  CHECK(make_model(1.0).G(0.7) == 1.0);
  CHECK(make_model(-2.0).G(3.0) == -2.0);
  CHECK(make_model(1.0).t_max == doctest::Approx(kPi));
  CHECK(std::isinf(make_model(0.0).t_max));

  // f = t + t³: G = −6t / (t + t³).
  const ModelSurface poly = make_polynomial_model({0.0, 1.0, 0.0, 1.0});
  CHECK(poly.G(1.0) == doctest::Approx(-3.0));
  CHECK(poly.G(2.0) == doctest::Approx(-12.0 / 10.0));
  CHECK_FALSE(poly.von_mangoldt);
  CHECK(model_consistency_defect(poly) < 1e-6);
  CHECK_THROWS_AS(make_polynomial_model({0.0, 2.0}), DomainError);
  CHECK_THROWS_AS(make_polynomial_model({1.0, 1.0}), DomainError);

  // f = t − t³/6 vanishes first at √6.
  const ModelSurface cubic = make_polynomial_model({0.0, 1.0, 0.0, -1.0 / 6.0});
  CHECK(cubic.t_max == doctest::Approx(std::sqrt(6.0)).epsilon(1e-8));

  std::vector<double> samples;
  for (int k = 0; k <= 60; ++k) samples.push_back(std::sin(0.05 * k));
  const ModelSurface tab = make_tabulated_model(0.05, samples);
  CHECK(std::abs(tab.G(1.0) - 1.0) < 1e-3);
  CHECK(tab.von_mangoldt);
  CHECK_THROWS_AS(make_tabulated_model(0.1, {0.0, 0.1, -0.1, 0.2, 0.3}), DomainError);
}

TEST_CASE("model distances") {
  // Flat model: polar coordinates of the plane.
  const ModelSurface flat = make_model(0.0);
  CHECK(model_distance(flat, {1.0, 0.0}, {1.0, kPi / 2}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(model_distance(flat, {1.0, 0.0}, {3.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-12));

  // Unit sphere: spherical law of cosines.
  const ModelSurface sphere = make_model(1.0);
  const double a = 0.8;
  const double b = 1.3;
  const double th = 1.1;
  const double oracle = std::acos(std::cos(a) * std::cos(b) + std::sin(a) * std::sin(b) * std::cos(th));
  CHECK(model_distance(sphere, {a, 0.0}, {b, th}) == doctest::Approx(oracle).epsilon(1e-12));

  // The numeric route against the closed form on tabulated and polynomial models.
  std::vector<double> samples;
  for (int k = 0; k <= 60; ++k) samples.push_back(std::sin(0.05 * k));
  const ModelSurface tab = make_tabulated_model(0.05, samples);
  CHECK(model_distance(tab, {a, 0.0}, {b, th}) == doctest::Approx(oracle).epsilon(1e-4));

  // f = t + t³/6 + t⁵/120 + ... truncated: compare against the κ = −1 law of cosines at small radii.
  const ModelSurface hyper = make_polynomial_model({0.0, 1.0, 0.0, 1.0 / 6.0, 0.0, 1.0 / 120.0, 0.0, 1.0 / 5040.0,
                                                    0.0, 1.0 / 362880.0});
  const double hyp = std::acosh(std::cosh(0.5) * std::cosh(0.6) - std::sinh(0.5) * std::sinh(0.6) * std::cos(0.9));
  CHECK(model_distance(hyper, {0.5, 0.0}, {0.6, 0.9}) == doctest::Approx(hyp).epsilon(1e-7));

  const ModelGeodesic radial = model_geodesic(flat, {1.0, 0.3}, {2.5, 0.3});
  CHECK(radial.length == doctest::Approx(1.5));
  CHECK(radial.start_angle == doctest::Approx(0.0));
}

TEST_CASE("comparison triangles") {
  const ComparisonTriangle t = comparison_triangle(make_model(0.0), 3.0, 4.0, 5.0);
  CHECK(t.pole_angle == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(t.angle_a == doctest::Approx(std::atan2(4.0, 3.0)).epsilon(1e-12));
  CHECK(t.angle_b == doctest::Approx(std::atan2(3.0, 4.0)).epsilon(1e-12));

  // Degenerate: b̃ on the far side of the pole.
  const ComparisonTriangle d = comparison_triangle(make_model(0.0), 1.0, 2.0, 3.0);
  CHECK(d.pole_angle == doctest::Approx(kPi).epsilon(1e-9));

  // Octant of the unit sphere: all angles π/2.
  const ComparisonTriangle o = comparison_triangle(make_model(1.0), kPi / 2, kPi / 2, kPi / 2);
  CHECK(o.pole_angle == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(o.angle_a == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(o.angle_b == doctest::Approx(kPi / 2).epsilon(1e-9));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 1.2);
  for (double kappa : {-1.0, 0.0, 1.0}) {
    for (int k = 0; k < 20; ++k) {
      const double pa = u(rng);
      const double pb = u(rng);
      const double ab = std::abs(pa - pb) + (pa + pb - std::abs(pa - pb)) * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
      const ComparisonTriangle c = comparison_triangle(make_model(kappa), pa, pb, ab);
      CAPTURE(kappa);
      CHECK(c.angle_a == doctest::Approx(law_of_cosines(kappa, pb, pa, ab)).epsilon(1e-8));
      CHECK(c.angle_b == doctest::Approx(law_of_cosines(kappa, pa, pb, ab)).epsilon(1e-8));
      CHECK(c.pole_angle == doctest::Approx(law_of_cosines(kappa, ab, pa, pb)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(comparison_triangle(make_model(0.0), 1.0, 1.0, 3.0), DomainError);
  CHECK_THROWS_AS(comparison_triangle(make_model(1.0), 2.0, 2.0, 3.0), DomainError);
}

TEST_CASE("radial curvature bound") {
  SampleSpec spec;
  spec.center = Vec{0, 0};
  spec.radius = 0.6;
  spec.points = 10;
  spec.directions = 3;
  const RadialBoundReport flat = radial_bound_check(riemann_sphere(), Vec{0, 0}, make_model(0.0), spec);
  CHECK(flat.holds);
  CHECK(flat.worst_margin == doctest::Approx(1.0).epsilon(1e-5));
  const RadialBoundReport tight = radial_bound_check(riemann_sphere(), Vec{0, 0}, make_model(1.0), spec);
  CHECK(tight.holds);
  CHECK(std::abs(tight.worst_margin) < 1e-5);
  CHECK_FALSE(radial_bound_check(hyperbolic_disk(), Vec{0, 0}, make_model(0.0), spec).holds);
}

TEST_CASE("Toponogov") {
  const FinslerStructure e = euclidean();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vec p{u(rng), u(rng)};
    const Vec a{u(rng), u(rng)};
    const Vec b{u(rng), u(rng)};
    const double area = std::abs((a[0] - p[0]) * (b[1] - p[1]) - (a[1] - p[1]) * (b[0] - p[0]));
    if (area < 0.05) continue;
    const ToponogovReport r = toponogov_check(e, make_forward_triangle(e, p, a, b), make_model(0.0));
    CHECK(r.holds);
    CHECK(std::abs(r.margin_a) < 1e-3);
    CHECK(std::abs(r.margin_b) < 1e-3);
  }
  const FinslerStructure sphere = riemann_sphere();
  const ForwardTriangle tri = make_forward_triangle(sphere, Vec{0, 0}, Vec{0.5, 0.0}, Vec{0.1, 0.45});
  const ToponogovReport strict = toponogov_check(sphere, tri, make_model(0.0));
  CHECK(strict.holds);
  CHECK(strict.margin_a > 1e-3);
  CHECK(strict.margin_b > 1e-3);
  const ToponogovReport equal = toponogov_check(sphere, tri, make_model(1.0));
  CHECK(std::abs(equal.margin_a) < 1e-4);
  CHECK(std::abs(equal.margin_b) < 1e-4);
}

TEST_CASE("side conditions") {
  const FinslerStructure e = euclidean();
  const ConditionReport r =
      condition_flags(e, make_forward_triangle(e, Vec{0, 0}, Vec{1, 0}, Vec{0, 1}), make_model(0.0));
  CHECK(r.ii_min_margin == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.iii_max_tangential < 1e-9);
  CHECK(r.iv_residual < 1e-9);
  CHECK_FALSE(r.i_applicable);
  CHECK(r.i_note.find("never vanishes") != std::string::npos);

  const FinslerStructure cr = test::curled_randers();
  const ConditionReport c =
      condition_flags(cr, make_forward_triangle(cr, Vec{0, 0}, Vec{0.3, 0}, Vec{0, 0.3}), make_model(0.0));
  CHECK(c.iii_max_tangential > 1e-3);
  CHECK_FALSE(c.iii_holds);

  const FinslerStructure sphere = riemann_sphere();
  const ConditionReport s = condition_flags(
      sphere, make_forward_triangle(sphere, Vec{0, 0}, Vec{0.3, 0}, Vec{0, 0.3}), make_model(1.0));
  // A side near p meets the closed ball of radius ρ = π/2; one beyond the equator does not.
  CHECK(s.i_applicable);
  CHECK(s.rho == doctest::Approx(kPi / 2));
  CHECK_FALSE(s.i_holds);
  const ConditionReport far = condition_flags(
      sphere, make_forward_triangle(sphere, Vec{0, 0}, Vec{1.5, 0}, Vec{0, 1.5}), make_model(1.0));
  CHECK(far.i_min_distance > kPi / 2);
  CHECK(far.i_holds);
}

TEST_CASE("comparison angle monotonicity") {
  const FinslerStructure sphere = riemann_sphere();
  const Vec p{0, 0};
  const Vec a{0.4, 0.0};
  const Vec v = Vec{0.0, 1.0} / sphere.norm(a, Vec{0.0, 1.0});
  const GeodesicPath sigma = integrate_geodesic(sphere, a, v, 1.0);
  const std::vector<double> times{0.2, 0.4, 0.6, 0.8, 1.0};
  const MonotonicityReport m = angle_monotonicity_check(sphere, p, sigma, times, make_model(0.0));
  CHECK(m.violations == 0);
  for (size_t k = 1; k < m.angles.size(); ++k) CHECK(m.angles[k] <= m.angles[k - 1] + 1e-9);
  const MonotonicityReport same = angle_monotonicity_check(sphere, p, sigma, times, make_model(1.0));
  for (size_t k = 1; k < same.angles.size(); ++k) CHECK(std::abs(same.angles[k] - same.angles[0]) < 1e-5);
}

TEST_CASE("double triangle lemma") {
  const ModelSurface flat = make_model(0.0);
  // Collinear x, y, z seen from p: the summed triangle reproduces the parts.
  const TriangleSides first{std::hypot(1.0, 1.0), 1.0, 1.0};
  const TriangleSides second{1.0, std::hypot(1.0, 1.0), 1.0};
  const DoubleTriangleReport r = double_triangle_check(flat, first, second);
  CHECK(r.precondition);
  CHECK(r.angle_sum_at_y == doctest::Approx(kPi));
  CHECK(r.holds);
  CHECK(std::abs(r.margin_x) < 1e-9);
  CHECK(std::abs(r.margin_z) < 1e-9);
  CHECK_THROWS_AS(double_triangle_check(flat, first, {1.5, 1.0, 1.0}), DomainError);
}

TEST_CASE("ray perpendicularity and the h-map") {
  for (const MinkowskiSpec& norm : {MinkowskiSpec{}, test::quartic()}) {
    const double L = 1.0;
    const FinslerStructure cyl = flat_cylinder(L, norm);
    const Vec up = Vec{0.0, 1.0} / cyl.norm(Vec{0, 0}, Vec{0.0, 1.0});
    const GeodesicPath sigma = integrate_geodesic(cyl, Vec{0, 0}, up, L * cyl.norm(Vec{0, 0}, Vec{0.0, 1.0}));
    REQUIRE(closed_geodesic_check(cyl, sigma));
    const Vec ray = Vec{1.0, 0.0} / cyl.norm(Vec{0, 0}, Vec{1.0, 0.0});
    const PerpendicularityReport r = ray_perpendicularity_probe(cyl, sigma, ray, {1.0, 10.0, 100.0});
    CHECK(r.holds);
    CHECK(r.final_deviation < 0.05);
    for (size_t k = 0; k < r.angles.size(); ++k) CHECK(std::abs(r.angles[k] - r.first_variation[k]) < 1e-3);

    const HMapReport h = h_map_check(cyl, sigma, {ray, Vec(-ray)});
    CHECK(h.holds);
    CHECK(h.max_abs < 1e-8);
  }
  const FinslerStructure r = randers(Vec{0.3, 0.0});
  const GeodesicPath line = integrate_geodesic(r, Vec{0, 0}, Vec{0.0, 1.0}, 1.0);
  CHECK_THROWS_AS(ray_perpendicularity_probe(r, line, Vec{1.0, 0.0}, {1.0}), HypothesisError);
}
