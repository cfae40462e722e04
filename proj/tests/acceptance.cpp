// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/curvature.hpp"
#include "finsler/fixtures.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/measure.hpp"
#include "finsler/norm_core.hpp"
#include "finsler/parallel.hpp"
#include "scenario.hpp"

using namespace finsler;
using finsler::lab::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SampleSpec region(int points, int directions = 10, std::uint64_t seed = 1) {
  SampleSpec s;
  s.center = Vec{0, 0};
  s.radius = 0.5;
  s.points = points;
  s.directions = directions;
  s.seed = seed;
  return s;
}

lab::RunReport run(const std::string& text) { return lab::run_scenario(lab::parse_scenario_text(text)); }

// Passing scenario runs, with the first failing criterion's name otherwise.
Outcome all_pass(const std::vector<std::pair<std::string, std::string>>& scenarios) {
  Outcome o{true, ""};
  for (const auto& [label, text] : scenarios) {
    const lab::RunReport r = run(text);
    if (r.status != lab::Status::kPass) {
      o.pass = false;
      std::string failed;
      for (const json& c : r.report["verdict"]["criteria"])
        if (!c["pass"].get<bool>()) failed += " " + c["name"].get<std::string>() + "=" + c["value"].dump();
      o.detail += label + " failed:" + failed + "; ";
    } else {
      o.detail += label + " ok; ";
    }
  }
  return o;
}

// --- 1 -------------------------------------------------------------------
Outcome tensor_axioms() {
  const auto t0 = Clock::now();
  int passing = 0;
  std::string failing;
  for (const FixtureInfo& f : fixture_catalog()) {
    const ValidationReport r = validate_structure(make_fixture(f.key), region(200));
    if (r.all_pass()) ++passing;
    else failing += " " + f.key;
  }
  const double t = seconds_since(t0);
  const int total = static_cast<int>(fixture_catalog().size());
  return {passing == total && total == 7 && t < 10.0,
          fmt("%.0f/%.0f fixtures pass, %.2f s (limit 10 s)", passing, total, t) + failing};
}

// --- 2 -------------------------------------------------------------------
std::array<double, 3> ambient(const Vec& x) {
  const double q = 1.0 + x[0] * x[0] + x[1] * x[1];
  return {2.0 * x[0] / q, 2.0 * x[1] / q, (q - 2.0) / q};
}

Outcome sphere_checks() {
  const auto t0 = Clock::now();
  const FinslerStructure sphere = riemann_sphere();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  double k_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec x{0.8 * u(rng), 0.8 * u(rng)};
    k_err = std::max(k_err, std::abs(flag_curvature(sphere, {x, Vec{u(rng), u(rng)}, Vec{u(rng), u(rng)}}) - 1.0));
  }

  double chern_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec x{0.8 * u(rng), 0.8 * u(rng)};
    const ConnectionCoefficients c = chern_connection(sphere, {x, Vec{u(rng), u(rng)}});
    const double q = 1.0 + x[0] * x[0] + x[1] * x[1];
    auto dphi = [&](int m) { return -2.0 * x[m] / q; };
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const double g = (a == j ? dphi(k) : 0.0) + (a == k ? dphi(j) : 0.0) - (j == k ? dphi(a) : 0.0);
          chern_err = std::max(chern_err, std::abs(c(a, j, k) - g));
        }
  }

  // Great circles X(t) = cos t X0 + sin t V0 through starts whose circles stay south of the pole at infinity.
  double geo_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r0 = 0.2 + 0.6 * (i % 5) / 4.0;
    const double phi = 2.0 * kPi * i / 20.0;
    const Vec x0{r0 * std::cos(phi), r0 * std::sin(phi)};
    const Vec dir{-std::sin(phi), std::cos(phi)};
    const Vec y0 = dir / sphere.norm(x0, dir);
    const auto X0 = ambient(x0);
    const double q = 1.0 + r0 * r0;
    const std::array<double, 3> V0{2.0 * y0[0] / q, 2.0 * y0[1] / q, 0.0};
    const GeodesicPath path = integrate_geodesic(sphere, x0, y0, kPi);
    for (size_t k = 0; k < path.times.size(); ++k) {
      const double t = path.times[k];
      const auto X = ambient(path.points[k]);
      double e = 0.0;
      for (int m = 0; m < 3; ++m) e += std::pow(X[m] - (std::cos(t) * X0[m] + std::sin(t) * V0[m]), 2);
      geo_err = std::max(geo_err, std::sqrt(e));
    }
  }
  const double t = seconds_since(t0);
  return {k_err <= 1e-4 && chern_err <= 1e-6 && geo_err <= 1e-5 && t < 30.0,
          fmt("max|K-1| %.2e, max Chern-Christoffel %.2e, ", k_err, chern_err) +
              fmt("max great-circle error %.2e, %.2f s (limit 30 s)", geo_err, t)};
}

// --- 3 -------------------------------------------------------------------
Outcome berwald_s() {
  double worst_s = 0.0;
  std::string names;
  for (const FixtureInfo& f : fixture_catalog()) {
    const FinslerStructure s = make_fixture(f.key);
    if (!s.traits().berwald) continue;
    names += " " + f.key;
    const SampleSpec spec = region(40, 10, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Vec& x : sample_points(s, spec))
      for (int k = 0; k < spec.directions; ++k) {
        const Vec y{u(rng), u(rng)};
        worst_s = std::max(worst_s, std::abs(s_curvature(s, {x, y})) / eval_norm(s, {x, y}));
      }
  }
  const BerwaldReport curled = is_berwald(make_fixture("randers", json{{"b", {0.2, 0.0}}, {"curl", 0.3}}), region(40));
  return {worst_s <= 1e-6 && curled.max_tangential >= 1e-2,
          fmt("max |S|/F over Berwald fixtures %.2e; curled Randers max |T| %.3f;", worst_s, curled.max_tangential) +
              names};
}

// --- 4 -------------------------------------------------------------------
Outcome volume_comparison() {
  const auto t0 = Clock::now();
  const std::vector<double> radii{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  MeasureOptions mc;
  mc.method = MeasureOptions::Method::kMonteCarlo;
  mc.samples = 1000000;
  mc.seed = 4;
  struct Case {
    const char* name;
    FinslerStructure s;
    double kappa;
  };
  const Case cases[] = {{"euclidean", euclidean(), 0.0}, {"flat-cylinder", flat_cylinder(1.0), 0.0},
                        {"sphere-cap", riemann_sphere(), 1.0}};
  int violations = 0;
  int pairs = 0;
  double worst = 0.0;
  for (const Case& c : cases) {
    const VolumeComparisonReport r =
        volume_comparison_check(c.s, Vec{0, 0}, {c.kappa, 0.0, 2}, radii, region(20), mc);
    violations += r.violations;
    pairs += static_cast<int>(r.pairs.size());
    worst = std::max(worst, r.max_excess_in_se);
  }
  const double t = seconds_since(t0);
  return {violations == 0 && t < 300.0,
          fmt("%.0f violations over %.0f annulus pairs, ", violations, pairs) +
              fmt("max excess %.2f SE, %.1f s (limit 300 s)", worst, t)};
}

// --- 5 -------------------------------------------------------------------
Outcome randers_volume() {
  const FinslerStructure r = make_fixture("randers");
  double worst = 0.0;
  for (double rad : {1.0, 5.0, 20.0})
    worst = std::max(worst, std::abs(ball_volume(r, Vec{0, 0}, rad).value / (kPi * rad * rad) - 1.0));
  std::vector<double> radii;
  for (int k = 1; k <= 20; ++k) radii.push_back(5.0 * k);
  const VolumeReport g = volume_growth_estimate(r, Vec{0, 0}, {}, radii);
  return {worst <= 0.01 && std::abs(g.v_m - 1.0) <= 0.02,
          fmt("max |vol/(pi r^2) - 1| %.2e, v_M %.6f", worst, g.v_m)};
}

// --- 6 -------------------------------------------------------------------
Outcome main_theorem() {
  const auto t0 = Clock::now();
  Outcome o = all_pass({
      {"cylinder", R"({"fixture": "flat-cylinder", "operation": "main-theorem-probe", "seed": 6,
                      "params": {"horizon_multiple": 100, "threshold": 0.05, "expect_closed": true}})"},
      {"torus", R"({"fixture": "flat-torus", "operation": "main-theorem-probe", "seed": 6,
                   "params": {"horizon_multiple": 100, "threshold": 0.05, "expect_closed": true}})"},
      {"minkowski", R"({"fixture": "randers", "operation": "main-theorem-probe", "seed": 6,
                       "fixture_params": {"b": [0.0, 0.0]},
                       "params": {"horizon_multiple": 100, "expect_closed": false, "expect_v_m": 1.0, "tol": 0.02}})"},
  });
  const double t = seconds_since(t0);
  o.pass = o.pass && t < 300.0;
  o.detail += fmt("%.2f s (limit 300 s)", t);
  return o;
}

// --- 7 -------------------------------------------------------------------
Outcome toponogov() {
  return all_pass({
      {"euclidean equality", R"({"fixture": "euclidean", "operation": "toponogov", "seed": 7,
                                "params": {"triangles": 50, "model": {"kappa": 0}, "tol": 1e-3, "expect": "equality"}})"},
      {"sphere vs kappa=0 strict", R"({"fixture": "riemann-sphere", "operation": "toponogov", "seed": 7,
                                      "params": {"triangles": 50, "model": {"kappa": 0}, "expect": "strict"}})"},
  });
}

// --- 8 -------------------------------------------------------------------
Outcome angle_crosscheck() {
  std::vector<std::pair<std::string, std::string>> runs;
  for (const FixtureInfo& f : fixture_catalog())
    runs.emplace_back(f.key, R"({"fixture": ")" + f.key + R"(", "operation": "angle_crosscheck", "seed": 8,
                                "params": {"configurations": 50, "tol": 1e-3}})");
  return all_pass(runs);
}

// --- 9 -------------------------------------------------------------------
Outcome perpendicularity() {
  return all_pass({
      {"euclidean norm", R"({"fixture": "flat-cylinder", "operation": "ray_perpendicularity", "seed": 9,
                            "params": {"horizon_multiple": 100, "tol": 0.05}})"},
      {"quartic norm", R"({"fixture": {"key": "flat-cylinder", "params": {"norm": "quartic"}},
                          "operation": "ray_perpendicularity", "seed": 9,
                          "params": {"horizon_multiple": 100, "tol": 0.05}})"},
  });
}

// --- 10 ------------------------------------------------------------------
Outcome h_map() {
  return all_pass({
      {"euclidean norm", R"({"fixture": "flat-cylinder", "operation": "h_map", "seed": 10,
                            "params": {"horizon_multiple": 200, "tol": 0.02, "max_fraction": 0.05}})"},
      {"quartic norm", R"({"fixture": {"key": "flat-cylinder", "params": {"norm": "quartic"}}, "operation": "h_map",
                          "seed": 10, "params": {"horizon_multiple": 200, "tol": 0.02, "max_fraction": 0.05}})"},
  });
}

// --- 11 ------------------------------------------------------------------
Outcome determinism() {
  const std::vector<std::string> scenarios{
      R"({"fixture": "riemann-sphere", "operation": "volume_comparison", "seed": 11,
          "params": {"radii": [0.5, 1.0, 1.5], "points": 4, "directions": 2, "samples": 20000}})",
      R"({"fixture": "riemann-sphere", "operation": "toponogov", "seed": 11,
          "params": {"triangles": 4, "model": {"kappa": 0}, "expect": "holds"}})",
      R"({"fixture": "flat-cylinder", "operation": "main-theorem-probe", "seed": 11})",
  };
  const int saved = thread_limit();
  int same = 0;
  for (const std::string& text : scenarios) {
    set_thread_limit(1);
    const std::string a = lab::results_digest(run(text));
    set_thread_limit(std::max(2, saved));
    const std::string b = lab::results_digest(run(text));
    const std::string c = lab::results_digest(run(text));
    same += a == b && b == c;
  }
  set_thread_limit(saved);
  return {same == static_cast<int>(scenarios.size()),
          fmt("%.0f/%.0f scenarios give byte-identical results across runs and thread counts", same,
              static_cast<double>(scenarios.size()))};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tensor axioms on every fixture", tensor_axioms},
      {"sphere curvature, connection and great circles", sphere_checks},
      {"Berwald fixtures have vanishing S; curled Randers is not Berwald", berwald_s},
      {"annulus volume comparison", volume_comparison},
      {"Randers ball volumes and v_M", randers_volume},
      {"closed geodesics force v_M = 0", main_theorem},
      {"Toponogov comparison", toponogov},
      {"limit-quotient vs first-variation angles", angle_crosscheck},
      {"rays meet the closed geodesic perpendicularly", perpendicularity},
      {"h-map vanishes on rays", h_map},
      {"determinism", determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
