#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/fixtures.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/norm_core.hpp"
#include "support.hpp"

using namespace finsler;
using finsler::test::all_fixtures;

namespace {

constexpr double kPi = std::numbers::pi;

// Inverse stereographic projection of the unit sphere chart onto R³.
std::array<double, 3> ambient(const Vec& x) {
  const double q = 1.0 + x[0] * x[0] + x[1] * x[1];
  return {2.0 * x[0] / q, 2.0 * x[1] / q, (q - 2.0) / q};
}

// Its differential applied to y.
std::array<double, 3> ambient_velocity(const Vec& x, const Vec& y) {
  const double q = 1.0 + x[0] * x[0] + x[1] * x[1];
  const double xy = x[0] * y[0] + x[1] * y[1];
  return {2.0 * y[0] / q - 4.0 * x[0] * xy / (q * q), 2.0 * y[1] / q - 4.0 * x[1] * xy / (q * q), 4.0 * xy / (q * q)};
}

double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

// Distance to the nearest multiple of L.
double wrap(double y, double L) { return std::abs(y - L * std::round(y / L)); }

}  // namespace

TEST_CASE("geodesic integration") {
  SUBCASE("Euclidean straight line") {
    const GeodesicPath path = integrate_geodesic(euclidean(), Vec{1, 2}, Vec{0.6, -0.8}, 3.0);
    for (size_t k = 0; k < path.times.size(); ++k)
      CHECK(euclidean_norm(path.points[k] - (Vec{1, 2} + path.times[k] * Vec{0.6, -0.8})) < 1e-12);
    CHECK(euclidean_norm(exp_map(euclidean(), Vec{1, 2}, Vec{3, 1}, 0.0) - Vec{1, 2}) == 0.0);
    CHECK(euclidean_norm(exp_map(euclidean(), Vec{1, 2}, Vec{3, 1}, 2.0) - Vec{7, 4}) < 1e-12);
  }
  SUBCASE("Minkowski Randers lines at unit speed") {
    const FinslerStructure r = randers(Vec{0.5, 0.0});
    const Vec y = Vec{-1.0, 0.7} / r.norm(Vec{0, 0}, Vec{-1.0, 0.7});
    const GeodesicPath path = integrate_geodesic(r, Vec{0.3, 0.1}, y, 4.0);
    for (size_t k = 0; k < path.times.size(); ++k) {
      CHECK(euclidean_norm(path.points[k] - (Vec{0.3, 0.1} + path.times[k] * y)) < 1e-10);
      CHECK(std::abs(r.norm(path.points[k], path.velocities[k]) - 1.0) < 1e-10);
    }
  }
  SUBCASE("sphere great circle") {
    // X0 = (0.8, 0, −0.6); V0 = (0, 1, 0) keeps the circle at height −0.6.
    const FinslerStructure sphere = riemann_sphere();
    const Vec x0{0.5, 0.0};
    const Vec y0 = Vec{0.0, 1.0} / sphere.norm(x0, Vec{0.0, 1.0});
    const auto X0 = ambient(x0);
    const auto V0 = ambient_velocity(x0, y0);
    CHECK(std::hypot(V0[0], V0[1], V0[2]) == doctest::Approx(1.0).epsilon(1e-12));
    const GeodesicPath path = integrate_geodesic(sphere, x0, y0, kPi);
    double worst = 0.0;
    for (size_t k = 0; k < path.times.size(); ++k) {
      const double t = path.times[k];
      const std::array<double, 3> oracle{std::cos(t) * X0[0] + std::sin(t) * V0[0],
                                         std::cos(t) * X0[1] + std::sin(t) * V0[1],
                                         std::cos(t) * X0[2] + std::sin(t) * V0[2]};
      worst = std::max(worst, dist3(ambient(path.points[k]), oracle));
    }
    CHECK(worst < 1e-5);
    CHECK(path.speed_drift < 1e-6);
    CHECK(euclidean_norm(exp_map(sphere, x0, y0, 2.0 * kPi) - x0) < 1e-5);

    const GeodesicPath loop = integrate_geodesic(sphere, x0, y0, 2.0 * kPi);
    CHECK(closed_geodesic_check(sphere, loop, 1e-5));
  }
  SUBCASE("unit speed preserved on every fixture") {
    for (const auto& [key, s] : all_fixtures()) {
      CAPTURE(key);
      const Vec x{0.1, -0.1};
      const Vec y = Vec{0.3, 0.9} / s.norm(x, Vec{0.3, 0.9});
      const GeodesicPath path = integrate_geodesic(s, x, y, 0.5);
      CHECK(path.speed_drift <= 1e-6);
      for (size_t k = 1; k < path.times.size(); ++k) CHECK(path.times[k] > path.times[k - 1]);
    }
  }
  SUBCASE("backward integration retraces") {
    const FinslerStructure sphere = riemann_sphere();
    const GeodesicPath fwd = integrate_geodesic(sphere, Vec{0.2, 0.1}, Vec{0.3, 0.2}, 1.0);
    const GeodesicPath bwd = integrate_geodesic(sphere, fwd.end(), fwd.velocities.back(), -1.0);
    CHECK(euclidean_norm(bwd.end() - Vec{0.2, 0.1}) < 1e-8);
  }
  SUBCASE("leaving the chart truncates") {
    // The curled one-form reaches |b| = 1 at finite distance.
    const GeodesicPath path = integrate_geodesic(finsler::test::curled_randers(), Vec{0, 0}, Vec{1, 0}, 100.0);
    CHECK(path.truncated);
    CHECK(path.duration() < 100.0);
  }
}

TEST_CASE("forward distance") {
  CHECK(distance(euclidean(), Vec{0, 0}, Vec{3, 4}) == doctest::Approx(5.0).epsilon(1e-12));

  // F(y) = |y| + b·y is a Minkowski norm: d(p, q) = F(q − p).
  const FinslerStructure r = randers(Vec{0.5, 0.0});
  CHECK(distance(r, Vec{0, 0}, Vec{1, 0}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(distance(r, Vec{1, 0}, Vec{0, 0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d_max(r, Vec{0, 0}, Vec{1, 0}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(d_max(r, Vec{1, 0}, Vec{0, 0}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(d_max(r, Vec{0.4, 0.2}, Vec{0.4, 0.2}) == 0.0);

  SUBCASE("flat cylinder against brute-force deck translates") {
    const double L = 2.0;
    const FinslerStructure cyl = flat_cylinder(L);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 30; ++t) {
      const Vec p{u(rng), u(rng)};
      const Vec q{u(rng), u(rng)};
      double oracle = INFINITY;
      for (int k = -10; k <= 10; ++k) oracle = std::min(oracle, std::hypot(q[0] - p[0], q[1] - p[1] + k * L));
      CHECK(distance(cyl, p, q) == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(distance(cyl, Vec{0.3, 0.1}, Vec{0.3, 0.1 + L / 2}) == doctest::Approx(L / 2).epsilon(1e-12));
  }
  SUBCASE("sphere distance is the central angle") {
    const FinslerStructure sphere = riemann_sphere();
    const Vec p{0.2, -0.3};
    const Vec q{-0.4, 0.5};
    const auto P = ambient(p);
    const auto Q = ambient(q);
    const double oracle = std::acos(P[0] * Q[0] + P[1] * Q[1] + P[2] * Q[2]);
    const DistanceResult d = solve_distance(sphere, p, q);
    CHECK(d.converged);
    CHECK(d.value == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(std::abs(sphere.norm(p, d.initial_velocity) - 1.0) < 1e-9);
    CHECK(d_max(sphere, p, q) == doctest::Approx(d.value).epsilon(1e-8));
  }
  SUBCASE("Funk distance is asymmetric") {
    // On the Funk disk d(0, x) = −log(1 − |x|) and d(x, 0) = log(1 + |x|).
    const FinslerStructure funk = funk_disk();
    CHECK(distance(funk, Vec{0, 0}, Vec{0.5, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-7));
    CHECK(distance(funk, Vec{0.5, 0}, Vec{0, 0}) == doctest::Approx(std::log(1.5)).epsilon(1e-7));
  }
}

TEST_CASE("terminal velocities") {
  const TerminalVelocitySet e = terminal_velocities(euclidean(), Vec{0, 0}, Vec{3, 4});
  REQUIRE(e.vectors.size() == 1);
  CHECK(euclidean_norm(e.vectors[0] - Vec{0.6, 0.8}) < 1e-10);

  const double L = 2.0;
  const TerminalVelocitySet c = terminal_velocities(flat_cylinder(L), Vec{0.5, 0.0}, Vec{0.5, L / 2});
  REQUIRE(c.vectors.size() == 2);
  CHECK(std::abs(c.vectors[0][0]) < 1e-10);
  CHECK(std::abs(c.vectors[0][1] + c.vectors[1][1]) < 1e-10);
  CHECK(std::abs(std::abs(c.vectors[0][1]) - 1.0) < 1e-10);

  const FinslerStructure sphere = riemann_sphere();
  const TerminalVelocitySet sv = terminal_velocities(sphere, Vec{0.1, 0.0}, Vec{-0.3, 0.4});
  REQUIRE(sv.vectors.size() == 1);
  CHECK(std::abs(sphere.norm(Vec{-0.3, 0.4}, sv.vectors[0]) - 1.0) < 1e-8);
}

TEST_CASE("angles") {
  const FinslerStructure e = euclidean();
  const GeodesicPath x_axis = integrate_geodesic(e, Vec{-1, 0}, Vec{1, 0}, 2.0);
  SUBCASE("right angle") {
    CHECK(measure_angle(e, Vec{0, 1}, x_axis, 1.0, AngleSense::kForward).angle ==
          doctest::Approx(kPi / 2).epsilon(1e-9));
    CHECK(measure_angle(e, Vec{0, 1}, x_axis, 1.0, AngleSense::kBackward).angle ==
          doctest::Approx(kPi / 2).epsilon(1e-9));
  }
  SUBCASE("collinear") {
    // p behind the vertex: moving forward heads away from p.
    CHECK(measure_angle(e, Vec{-3, 0}, x_axis, 1.0, AngleSense::kForward).angle ==
          doctest::Approx(kPi).epsilon(1e-6));
    // p ahead of the vertex.
    CHECK(measure_angle(e, Vec{3, 0}, x_axis, 1.0, AngleSense::kForward).angle < 1e-6);
  }
  SUBCASE("Euclidean first variation is the Euclidean angle") {
    const Vec v = Vec{1, 1} / std::sqrt(2.0);
    CHECK(first_variation_angle(e, Vec{0, 0}, Vec{1, 0}, v, AngleSense::kForward) ==
          doctest::Approx(3 * kPi / 4).epsilon(1e-10));
    CHECK(first_variation_angle(e, Vec{0, 0}, Vec{1, 0}, Vec{0, 1}, AngleSense::kForward) ==
          doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(first_variation_pairing(e, Vec{0, 0}, Vec{1, 0}, v) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-10));
  }
  SUBCASE("two minimizers: the smaller pairing wins") {
    const double L = 2.0;
    const FinslerStructure cyl = flat_cylinder(L);
    const Vec x{0.0, L / 2};
    const Vec v{0.6, 0.8};
    const double oracle = std::acos(0.8);  // against the upward minimizer
    CHECK(first_variation_angle(cyl, Vec{0, 0}, x, v, AngleSense::kForward) ==
          doctest::Approx(oracle).epsilon(1e-10));
    const GeodesicPath path = integrate_geodesic(cyl, x - 0.5 * v, v, 1.0);
    CHECK(std::abs(measure_angle(cyl, Vec{0, 0}, path, 0.5, AngleSense::kForward).angle - oracle) < 1e-3);
  }
  SUBCASE("limit quotient against first variation on Randers") {
    const FinslerStructure r = finsler::test::curled_randers();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int t = 0; t < 6; ++t) {
      const Vec p{u(rng), u(rng)};
      const Vec x{u(rng), u(rng)};
      if (euclidean_norm(p - x) < 0.2) continue;
      Vec v{u(rng), u(rng)};
      v = v / r.norm(x, v);
      const AngleSense sense = t % 2 ? AngleSense::kBackward : AngleSense::kForward;
      const GeodesicPath path = sense == AngleSense::kForward ? integrate_geodesic(r, x, v, 0.2)
                                                              : integrate_geodesic(r, x, v, -0.2);
      const double t0 = 0.0;
      const double lq = measure_angle(r, p, path, t0, sense).angle;
      const double fv = first_variation_angle(r, p, x, v, sense);
      CAPTURE(t);
      CHECK(std::abs(lq - fv) < 1e-3);
    }
  }
}

TEST_CASE("rays") {
  const RaySearch e = find_rays(euclidean(), Vec{0, 0}, 50.0, 1e-3, 72);
  CHECK(e.fraction == 1.0);
  const RaySearch m = find_rays(randers(Vec{0.3, 0.2}), Vec{0, 0}, 50.0, 1e-3, 72);
  CHECK(m.fraction == 1.0);

  SUBCASE("cylinder unwrapping oracle") {
    const double L = 1.0;
    const FinslerStructure cyl = flat_cylinder(L);
    const double horizon = 20.0;
    const int t_samples = 8;
    const RaySearch rs = find_rays(cyl, Vec{0, 0}, horizon, 1e-3, 360, t_samples);
    int mismatches = 0;
    int oracle_rays = 0;
    for (size_t i = 0; i < rs.directions.size(); ++i) {
      const Vec& u = rs.directions[i];
      bool ray = true;
      for (int k = 1; k <= t_samples; ++k) {
        const double t = horizon * k / t_samples;
        if (std::hypot(u[0] * t, wrap(u[1] * t, L)) < t * (1.0 - 1e-3)) ray = false;
      }
      oracle_rays += ray;
      mismatches += ray != static_cast<bool>(rs.is_ray[i]);
    }
    CHECK(mismatches == 0);
    CHECK(rs.fraction == doctest::Approx(static_cast<double>(oracle_rays) / rs.directions.size()));
    CHECK(rs.fraction < 0.1);
    const RaySearch far = find_rays(cyl, Vec{0, 0}, 200.0, 1e-3, 360);
    CHECK(far.fraction <= rs.fraction);
    CHECK(find_rays(flat_torus(), Vec{0, 0}, 200.0, 1e-3, 360).fraction < 0.02);
  }
}

TEST_CASE("closed geodesics") {
  const double L = 1.5;
  const FinslerStructure cyl = flat_cylinder(L);
  CHECK(closed_geodesic_check(cyl, integrate_geodesic(cyl, Vec{0.2, 0.3}, Vec{0, 1}, L)));
  CHECK_FALSE(closed_geodesic_check(cyl, integrate_geodesic(cyl, Vec{0.2, 0.3}, Vec{0, 1}, 0.7 * L)));
  CHECK_FALSE(closed_geodesic_check(euclidean(), integrate_geodesic(euclidean(), Vec{0, 0}, Vec{1, 0}, 3.0)));

  const auto found = find_closed_geodesic(cyl, Vec{0, 0}, 10.0);
  REQUIRE(found.has_value());
  CHECK(found->length() == doctest::Approx(L).epsilon(1e-10));
  CHECK(closed_geodesic_check(cyl, *found));
  CHECK_FALSE(find_closed_geodesic(euclidean(), Vec{0, 0}, 100.0).has_value());
  CHECK(find_closed_geodesic(flat_torus(2.0, 3.0), Vec{0, 0}, 10.0).has_value());
}

TEST_CASE("terminal velocity limit") {
  const std::vector<double> times{1, 2, 4, 8};
  const TerminalLimitReport e = terminal_velocity_limit_probe(euclidean(), Vec{0, 0}, Vec{0.6, 0.8}, times);
  for (double h : e.hausdorff) CHECK(h < 1e-10);
  const TerminalLimitReport c = terminal_velocity_limit_probe(flat_cylinder(1.0), Vec{0, 0}, Vec{1, 0}, times);
  CHECK(c.non_increasing);
  CHECK(c.hausdorff.back() < 1e-8);
  for (int n : c.set_sizes) CHECK(n == 1);
}

TEST_CASE("forward triangles") {
  const FinslerStructure r = randers(Vec{0.4, 0.1});
  const ForwardTriangle tri = make_forward_triangle(r, Vec{0, 0}, Vec{1, 0}, Vec{0, 1});
  CHECK(tri.length_pa == doctest::Approx(r.norm(Vec{0, 0}, Vec{1, 0})).epsilon(1e-10));
  CHECK(tri.length_ab == doctest::Approx(r.norm(Vec{0, 0}, Vec{-1, 1})).epsilon(1e-10));
  CHECK(tri.side_pb.length() == doctest::Approx(tri.length_pb).epsilon(1e-6));
  CHECK(euclidean_norm(tri.side_ab.end() - Vec{0, 1}) < 1e-8);
}

TEST_CASE("path csv") {
  std::ostringstream out;
  write_path_csv(out, integrate_geodesic(euclidean(), Vec{0, 0}, Vec{1, 0}, 1.0));
  CHECK(out.str().rfind("t,x1,x2,v1,v2\n", 0) == 0);
}
