#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "finsler/comparison.hpp"
#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/fixtures.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/measure.hpp"
#include "finsler/norm_core.hpp"
#include "finsler/parallel.hpp"

#ifndef FINSLER_LAB_VERSION
#define FINSLER_LAB_VERSION "0.0.0"
#endif

namespace finsler::lab {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// JSON helpers

json vec_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec json_vec(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ScenarioError("parameter '" + what + "' must be an array of " + std::to_string(n) + " numbers");
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) throw ScenarioError("parameter '" + what + "' must contain numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::vector<double> json_doubles(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ScenarioError("parameter '" + what + "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ScenarioError("parameter '" + what + "' must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> linspace_to(double top, int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(top * k / count);
  return out;
}

std::string csv_number(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

// ---------------------------------------------------------------------------
// Execution context

struct Context {
  const Scenario& scenario;
  const FinslerStructure& s;
  std::uint64_t seed;
  json results = json::object();
  json criteria = json::array();
  std::vector<Artifact> artifacts;

  const json& param(const std::string& key) const { return scenario.params.at(key); }
  double number(const std::string& key) const { return param(key).get<double>(); }
  int integer(const std::string& key) const { return param(key).get<int>(); }
  bool has(const std::string& key) const { return !param(key).is_null(); }

  [[nodiscard]] double scale() const { return s.traits().scale; }

  Vec point(const std::string& key) const {
    return has(key) ? json_vec(param(key), s.dim(), key) : Vec(s.dim());
  }

  SampleSpec region(int points, int directions) const {
    SampleSpec spec;
    spec.center = point("center");
    spec.radius = number("region_radius");
    spec.points = points;
    spec.directions = directions;
    spec.seed = seed;
    return spec;
  }

  MeasureOptions measure() const {
    MeasureOptions o;
    const std::string m = param("method").get<std::string>();
    if (m == "exact") o.method = MeasureOptions::Method::kExact;
    else if (m == "monte_carlo") o.method = MeasureOptions::Method::kMonteCarlo;
    else if (m == "auto") o.method = MeasureOptions::Method::kAuto;
    else throw ScenarioError("parameter 'method' must be auto, exact or monte_carlo");
    o.samples = param("samples").get<long>();
    o.seed = seed;
    return o;
  }

  ModelSurface model() const {
    const json& m = param("model");
    if (!m.is_object()) throw ScenarioError("parameter 'model' must be an object");
    if (m.contains("kappa")) return make_model(m["kappa"].get<double>());
    if (m.contains("polynomial")) return make_polynomial_model(json_doubles(m["polynomial"], "model.polynomial"));
    if (m.contains("table")) {
      const json& t = m["table"];
      return make_tabulated_model(t.at("h").get<double>(), json_doubles(t.at("values"), "model.table.values"));
    }
    throw ScenarioError("parameter 'model' needs one of kappa, polynomial, table");
  }

  /// Records a numeric criterion; the verdict is the conjunction of all of them.
  void check(const std::string& name, double value, const std::string& relation, double threshold) {
    bool pass = false;
    if (relation == "<=") pass = value <= threshold;
    else if (relation == ">=") pass = value >= threshold;
    else if (relation == ">") pass = value > threshold;
    else if (relation == "==") pass = value == threshold;
    criteria.push_back({{"name", name}, {"value", value}, {"relation", relation}, {"threshold", threshold},
                        {"pass", pass}});
  }

  void csv(const std::string& file, const std::string& content) {
    if (scenario.write_csv) artifacts.push_back({file, content});
  }
};

/// Triples of region points spanning a chart triangle of at least `min_area`.
std::vector<std::array<Vec, 3>> random_triangles(const FinslerStructure& s, const SampleSpec& region, int count,
                                                 double min_area) {
  SampleSpec spec = region;
  spec.points = 3 * count * 8;
  const auto pts = sample_points(s, spec);
  std::vector<std::array<Vec, 3>> out;
  for (size_t k = 0; k + 2 < pts.size() && static_cast<int>(out.size()) < count; k += 3) {
    const Vec u = pts[k + 1] - pts[k];
    const Vec v = pts[k + 2] - pts[k];
    const double gram = dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v);
    if (gram >= 4.0 * min_area * min_area) out.push_back({pts[k], pts[k + 1], pts[k + 2]});
  }
  if (static_cast<int>(out.size()) < count) throw DomainError("could not place enough non-degenerate triangles");
  return out;
}

// ---------------------------------------------------------------------------
// Operations

void op_validate_structure(Context& c) {
  const SampleSpec spec = c.region(c.integer("points"), c.integer("directions"));
  const ValidationReport v = validate_structure(c.s, spec);
  json axioms = json::object();
  for (const AxiomCheck* a : {&v.smoothness, &v.homogeneity, &v.positivity, &v.convexity})
    axioms[a->name] = {{"worst", a->worst}, {"pass", a->pass}};
  c.results["axioms"] = axioms;

  const int n = c.s.dim();
  const auto pts = sample_points(c.s, spec);
  const auto probes = sample_directions(n, 3 * spec.directions, spec.seed + 11);
  double euler = 0.0;
  double cartan_asym = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  int samples = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto ys = indicatrix_sample(c.s, pts[i], spec.directions, spec.seed + i);
    for (size_t j = 0; j < ys.size(); ++j) {
      const TangentVector& y = ys[j];
      const Mat g = fundamental_tensor(c.s, y).matrix;
      const double f = eval_norm(c.s, y);
      euler = std::max(euler, std::abs(bilinear(g, y.fiber, y.fiber) - f * f) / (f * f));
      const auto eig = symmetric_eigenvalues(g);
      min_eig = std::min(min_eig, *std::min_element(eig.begin(), eig.end()) / *std::max_element(eig.begin(), eig.end()));
      const Vec& u1 = probes[(3 * j) % probes.size()];
      const Vec& u2 = probes[(3 * j + 1) % probes.size()];
      const Vec& u3 = probes[(3 * j + 2) % probes.size()];
      const double c123 = cartan_tensor(c.s, y, u1, u2, u3);
      for (const double other : {cartan_tensor(c.s, y, u1, u3, u2), cartan_tensor(c.s, y, u3, u2, u1)})
        cartan_asym = std::max(cartan_asym, std::abs(other - c123) / std::max(1.0, std::abs(c123)));
      ++samples;
    }
  }
  c.results["samples"] = samples;
  c.results["euler_identity_defect"] = euler;
  c.results["min_relative_eigenvalue"] = min_eig;
  c.results["cartan_symmetry_defect"] = cartan_asym;
  for (const auto& [name, a] : axioms.items()) c.check("axiom " + name, a["pass"].get<bool>() ? 1.0 : 0.0, "==", 1.0);
  c.check("euler identity", euler, "<=", c.number("tol_exact"));
  c.check("positive definite", min_eig, ">", 0.0);
  c.check("cartan symmetry", cartan_asym, "<=", c.number("tol_fd"));
}

void op_curvature_survey(Context& c) {
  const SampleSpec spec = c.region(c.integer("flags"), 2);
  const auto pts = sample_points(c.s, spec);
  std::vector<double> ks;
  std::ostringstream csv;
  csv << "x1,x2,K\n";
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto dirs = sample_directions(c.s.dim(), 2, spec.seed + 101 + i);
    try {
      const double k = flag_curvature(c.s, {pts[i], dirs[0], dirs[1]});
      ks.push_back(k);
      csv << csv_number(pts[i][0]) << ',' << csv_number(pts[i][1]) << ',' << csv_number(k) << '\n';
    } catch (const DegenerateError&) {
    }
  }
  if (ks.empty()) throw DomainError("curvature_survey: every sampled flag was degenerate");
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  c.results["flags"] = ks.size();
  c.results["min_K"] = *lo;
  c.results["max_K"] = *hi;
  c.csv("flag_curvature.csv", csv.str());
  if (c.has("expected_K")) {
    const double e = c.number("expected_K");
    const double dev = std::max(std::abs(*lo - e), std::abs(*hi - e));
    c.results["max_deviation"] = dev;
    c.check("flag curvature near expected", dev, "<=", c.number("tol"));
  }
}

void op_berwald_check(Context& c) {
  const SampleSpec spec = c.region(c.integer("points"), c.integer("directions"));
  const BerwaldReport b = is_berwald(c.s, spec, c.number("tol"));
  double max_s = 0.0;
  for (const Vec& x : sample_points(c.s, spec))
    for (const TangentVector& v : indicatrix_sample(c.s, x, spec.directions, spec.seed + 3))
      max_s = std::max(max_s, std::abs(s_curvature(c.s, v)));
  c.results["is_berwald"] = b.berwald;
  c.results["max_tangential"] = b.max_tangential;
  c.results["max_quadraticity_defect"] = b.max_quadraticity_defect;
  c.results["max_abs_S"] = max_s;
  c.results["witness"] = {{"x", vec_json(b.witness_x)}, {"v", vec_json(b.witness_v)}, {"w", vec_json(b.witness_w)}};
  c.results["claimed_berwald"] = c.s.traits().berwald;
  if (c.s.traits().berwald) {
    c.check("Berwald test passes", b.berwald ? 1.0 : 0.0, "==", 1.0);
    c.check("S-curvature vanishes", max_s, "<=", c.number("tol"));
  } else {
    c.check("tangential curvature witness", b.max_tangential, ">=", c.number("witness_min"));
  }
}

void op_reversibility(Context& c) {
  const double rho = reversibility_constant(c.s, c.region(c.integer("points"), c.integer("directions")));
  c.results["reversibility_constant"] = rho;
  c.results["claimed_reversible"] = c.s.traits().reversible;
}

void op_geodesic(Context& c) {
  const Vec x0 = c.point("x0");
  if (!c.has("y0")) throw ScenarioError("geodesic needs 'y0'");
  const Vec y0 = json_vec(c.param("y0"), c.s.dim(), "y0");
  const GeodesicPath path = integrate_geodesic(c.s, x0, y0, c.number("t_end"));
  c.results["end"] = vec_json(path.end());
  c.results["end_velocity"] = vec_json(path.velocities.back());
  c.results["speed"] = path.speed;
  c.results["speed_drift"] = path.speed_drift;
  c.results["length"] = path.length();
  c.results["steps"] = path.times.size();
  c.results["truncated"] = path.truncated;
  std::ostringstream out;
  write_path_csv(out, path);
  c.csv("path.csv", out.str());
}

void op_distance(Context& c) {
  const Vec p = c.point("p");
  if (!c.has("q")) throw ScenarioError("distance needs 'q'");
  const Vec q = json_vec(c.param("q"), c.s.dim(), "q");
  const DistanceResult fwd = solve_distance(c.s, p, q);
  const DistanceResult bwd = solve_distance(c.s, q, p);
  c.results["forward"] = fwd.value;
  c.results["backward"] = bwd.value;
  c.results["d_max"] = std::max(fwd.value, bwd.value);
  c.results["converged"] = fwd.converged && bwd.converged;
  c.results["initial_velocity"] = vec_json(fwd.initial_velocity);
  c.check("distance solver converged", fwd.converged && bwd.converged ? 1.0 : 0.0, "==", 1.0);
}

json volume_json(const VolumeEstimate& v) { return {{"value", v.value}, {"se", v.se}, {"exact", v.exact}}; }

void op_ball_volume(Context& c) {
  const Vec p = c.point("p");
  const auto radii = json_doubles(c.param("radii"), "radii");
  const int n = c.s.dim();
  const double unit_ball = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  PolarVolume pv(c.s, p, *std::max_element(radii.begin(), radii.end()), c.measure());
  json rows = json::array();
  double worst = 0.0;
  for (double r : radii) {
    const VolumeEstimate v = pv.ball(r);
    const double ratio = v.value / (unit_ball * std::pow(r, n));
    rows.push_back({{"r", r}, {"volume", volume_json(v)}, {"euclidean_ratio", ratio}});
    if (c.has("expect_ratio")) worst = std::max(worst, std::abs(ratio - c.number("expect_ratio")));
  }
  c.results["balls"] = rows;
  if (c.has("expect_ratio")) {
    c.results["max_ratio_deviation"] = worst;
    c.check("ball volume ratio", worst, "<=", c.number("tol") * c.number("expect_ratio"));
  }
}

json volume_report_json(const VolumeReport& v) {
  return {{"radii", v.radii},           {"volumes", v.volumes}, {"standard_errors", v.standard_errors},
          {"comparison", v.comparison}, {"ratios", v.ratios},   {"v_m", v.v_m},
          {"v_m_se", v.v_m_se},         {"monotonicity_violations", v.monotonicity_violations},
          {"exact", v.exact}};
}

std::string ratio_csv(const VolumeReport& v) {
  std::ostringstream out;
  out << "r,vol,V,ratio,SE\n";
  for (size_t k = 0; k < v.radii.size(); ++k)
    out << csv_number(v.radii[k]) << ',' << csv_number(v.volumes[k]) << ',' << csv_number(v.comparison[k]) << ','
        << csv_number(v.ratios[k]) << ',' << csv_number(v.standard_errors[k]) << '\n';
  return out.str();
}

std::vector<double> radii_grid(const Context& c, double default_top) {
  if (c.has("radii")) return json_doubles(c.param("radii"), "radii");
  const double top = c.has("r_max") ? c.number("r_max") : default_top;
  return linspace_to(top, c.integer("count"));
}

void op_volume_growth(Context& c) {
  const ComparisonParams params{c.number("kappa"), c.number("lambda"), c.s.dim()};
  const auto radii = radii_grid(c, 50.0 * c.scale());
  const VolumeReport v = volume_growth_estimate(c.s, c.point("p"), params, radii, c.integer("window"), c.measure());
  c.results = volume_report_json(v);
  c.csv("ratio_curve.csv", ratio_csv(v));
  if (c.has("expect_v_m")) {
    const double e = c.number("expect_v_m");
    c.check("v_M near expected", std::abs(v.v_m - e), "<=", c.number("tol") * std::max(e, 1e-12));
  }
  if (c.has("max_v_m")) c.check("v_M bound", v.v_m, "<=", c.number("max_v_m"));
}

void op_volume_comparison(Context& c) {
  const ComparisonParams params{c.number("kappa"), c.number("lambda"), c.s.dim()};
  const auto radii = json_doubles(c.param("radii"), "radii");
  const Vec p = c.point("p");
  SampleSpec region = c.region(c.integer("points"), c.integer("directions"));
  region.center = p;
  const VolumeComparisonReport r = volume_comparison_check(c.s, p, params, radii, region, c.measure());
  json pairs = json::array();
  std::ostringstream csv;
  csv << "r,R,s,S,ratio_inner,ratio_outer,excess,se,violation\n";
  for (const AnnulusPair& a : r.pairs) {
    pairs.push_back({{"r", a.r}, {"R", a.R}, {"s", a.s}, {"S", a.S}, {"ratio_inner", a.ratio_inner},
                     {"ratio_outer", a.ratio_outer}, {"excess", a.excess}, {"se", a.se}, {"violation", a.violation}});
    csv << csv_number(a.r) << ',' << csv_number(a.R) << ',' << csv_number(a.s) << ',' << csv_number(a.S) << ','
        << csv_number(a.ratio_inner) << ',' << csv_number(a.ratio_outer) << ',' << csv_number(a.excess) << ','
        << csv_number(a.se) << ',' << (a.violation ? 1 : 0) << '\n';
  }
  c.results["hypotheses"] = {{"min_ricci_margin", r.hypotheses.min_ricci_margin},
                             {"max_s", r.hypotheses.max_s},
                             {"holds", r.hypotheses.holds}};
  c.results["pairs"] = pairs;
  c.results["violations"] = r.violations;
  c.results["max_excess_in_se"] = r.max_excess_in_se;
  c.results["exact"] = r.exact;
  c.csv("annulus_pairs.csv", csv.str());
  c.check("violations beyond 3 SE", r.violations, "==", 0.0);
}

void op_find_rays(Context& c) {
  const double horizon = c.has("horizon") ? c.number("horizon") : 200.0 * c.scale();
  const RaySearch rs = find_rays(c.s, c.point("p"), horizon, c.number("tol"), c.integer("resolution"),
                                 c.integer("t_samples"), c.seed);
  json rays = json::array();
  for (const Vec& v : rs.rays()) rays.push_back(vec_json(v));
  c.results["horizon"] = horizon;
  c.results["fraction"] = rs.fraction;
  c.results["rays"] = rays;
  std::ostringstream csv;
  csv << "index,is_ray\n";
  for (size_t k = 0; k < rs.is_ray.size(); ++k) csv << k << ',' << (rs.is_ray[k] ? 1 : 0) << '\n';
  c.csv("ray_directions.csv", csv.str());
  if (c.has("max_fraction")) c.check("ray fraction", rs.fraction, "<=", c.number("max_fraction"));
}

json closed_json(const std::optional<GeodesicPath>& g) {
  if (!g) return {{"found", false}};
  return {{"found", true},
          {"length", g->length()},
          {"initial_velocity", vec_json(g->velocities.front())},
          {"displacement", vec_json(g->end() - g->start())}};
}

void op_closed_geodesic(Context& c) {
  const double horizon = c.has("horizon") ? c.number("horizon") : 10.0 * c.scale();
  const auto g = find_closed_geodesic(c.s, c.point("p"), horizon, c.integer("directions"));
  c.results = closed_json(g);
  c.results["horizon"] = horizon;
  if (g) {
    std::ostringstream out;
    write_path_csv(out, *g);
    c.csv("closed_geodesic.csv", out.str());
  }
  if (c.has("expect_found"))
    c.check("closed geodesic found as expected", (g.has_value() == c.param("expect_found").get<bool>()) ? 1.0 : 0.0,
            "==", 1.0);
}

void op_toponogov(Context& c) {
  const ModelSurface m = c.model();
  const int count = c.integer("triangles");
  const SampleSpec region = c.region(0, 0);
  const auto tris = random_triangles(c.s, region, count, c.number("min_area"));
  const double tol = c.number("tol");
  const std::string expect = c.param("expect").get<std::string>();
  if (expect != "holds" && expect != "equality" && expect != "strict")
    throw ScenarioError("parameter 'expect' must be holds, equality or strict");
  json rows = json::array();
  std::ostringstream csv;
  csv << "px,py,ax,ay,bx,by,forward_a,backward_b,model_a,model_b\n";
  int skipped = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_abs_margin = 0.0;
  for (const auto& [p, a, b] : tris) {
    try {
      const ForwardTriangle tri = make_forward_triangle(c.s, p, a, b);
      const ToponogovReport r = toponogov_check(c.s, tri, m, tol);
      rows.push_back({{"p", vec_json(p)},
                      {"a", vec_json(a)},
                      {"b", vec_json(b)},
                      {"forward_angle_a", r.forward_angle_a},
                      {"backward_angle_b", r.backward_angle_b},
                      {"model_angle_a", r.model.angle_a},
                      {"model_angle_b", r.model.angle_b},
                      {"margin_a", r.margin_a},
                      {"margin_b", r.margin_b},
                      {"conditions",
                       {{"i", r.conditions.i_applicable ? json(r.conditions.i_holds) : json(r.conditions.i_note)},
                        {"ii_min_margin", r.conditions.ii_min_margin},
                        {"iii_max_tangential", r.conditions.iii_max_tangential},
                        {"iv_residual", r.conditions.iv_residual}}}});
      csv << csv_number(p[0]) << ',' << csv_number(p[1]) << ',' << csv_number(a[0]) << ',' << csv_number(a[1]) << ','
          << csv_number(b[0]) << ',' << csv_number(b[1]) << ',' << csv_number(r.forward_angle_a) << ','
          << csv_number(r.backward_angle_b) << ',' << csv_number(r.model.angle_a) << ','
          << csv_number(r.model.angle_b) << '\n';
      min_margin = std::min({min_margin, r.margin_a, r.margin_b});
      max_abs_margin = std::max({max_abs_margin, std::abs(r.margin_a), std::abs(r.margin_b)});
    } catch (const DomainError& e) {
      ++skipped;
      rows.push_back({{"p", vec_json(p)}, {"a", vec_json(a)}, {"b", vec_json(b)}, {"skipped", e.what()}});
    } catch (const NonSmoothError& e) {
      ++skipped;
      rows.push_back({{"p", vec_json(p)}, {"a", vec_json(a)}, {"b", vec_json(b)}, {"skipped", e.what()}});
    }
  }
  c.results["model"] = m.describe();
  c.results["triangles"] = rows;
  c.results["skipped"] = skipped;
  c.results["min_margin"] = min_margin;
  c.results["max_abs_margin"] = max_abs_margin;
  c.csv("triangles.csv", csv.str());
  c.check("skipped triangles", skipped, "<=", c.number("max_skipped"));
  if (expect == "holds") c.check("min margin", min_margin, ">=", -tol);
  if (expect == "equality") c.check("max |margin|", max_abs_margin, "<=", tol);
  if (expect == "strict") c.check("min margin", min_margin, ">", c.number("strict_floor"));
}

void op_angle_crosscheck(Context& c) {
  const int count = c.integer("configurations");
  SampleSpec region = c.region(2 * count, 0);
  const auto pts = sample_points(c.s, region);
  const auto dirs = sample_directions(c.s.dim(), count, c.seed + 17);
  const double len = c.number("path_length");
  json rows = json::array();
  int skipped = 0;
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const Vec& p = pts[2 * k];
    const Vec& b = pts[2 * k + 1];
    const Vec v = dirs[k] / c.s.norm(b, dirs[k]);
    const AngleSense sense = k % 2 == 0 ? AngleSense::kForward : AngleSense::kBackward;
    try {
      const GeodesicPath path = integrate_geodesic(c.s, b, v, sense == AngleSense::kForward ? len : -len);
      const double limit = measure_angle(c.s, p, path, 0.0, sense).angle;
      const double fv = first_variation_angle(c.s, p, b, v, sense);
      worst = std::max(worst, std::abs(limit - fv));
      rows.push_back({{"sense", sense == AngleSense::kForward ? "forward" : "backward"},
                      {"limit_quotient", limit},
                      {"first_variation", fv}});
    } catch (const Error& e) {
      ++skipped;
      rows.push_back({{"sense", sense == AngleSense::kForward ? "forward" : "backward"}, {"skipped", e.what()}});
    }
  }
  c.results["configurations"] = rows;
  c.results["compared"] = count - skipped;
  c.results["max_difference"] = worst;
  c.check("max |limit - first variation|", worst, "<=", c.number("tol"));
  c.check("compared configurations", count - skipped, ">=", 1.0);
}

void op_angle_monotonicity(Context& c) {
  const Vec p = c.point("p");
  const Vec a = c.point("a");
  if (!c.has("direction")) throw ScenarioError("angle_monotonicity needs 'direction'");
  const Vec y = json_vec(c.param("direction"), c.s.dim(), "direction");
  const auto times = json_doubles(c.param("times"), "times");
  const GeodesicPath sigma = integrate_geodesic(c.s, a, y / c.s.norm(a, y), *std::max_element(times.begin(), times.end()));
  const MonotonicityReport r = angle_monotonicity_check(c.s, p, sigma, times, c.model(), c.number("tol"));
  c.results = {{"times", r.times},   {"side_lengths", r.side_lengths}, {"radial_lengths", r.radial_lengths},
               {"angles", r.angles}, {"violations", r.violations},     {"truncated", r.truncated},
               {"note", r.note}};
  std::ostringstream csv;
  csv << "t,length,radial,angle\n";
  for (size_t k = 0; k < r.times.size(); ++k)
    csv << csv_number(r.times[k]) << ',' << csv_number(r.side_lengths[k]) << ',' << csv_number(r.radial_lengths[k])
        << ',' << csv_number(r.angles[k]) << '\n';
  c.csv("angle_trace.csv", csv.str());
  c.check("monotonicity violations", r.violations, "==", 0.0);
}

void op_radial_bound(Context& c) {
  const RadialBoundReport r =
      radial_bound_check(c.s, c.point("p"), c.model(), c.region(c.integer("points"), c.integer("directions")),
                         c.number("tol"));
  c.results = {{"samples", r.samples}, {"worst_margin", r.worst_margin}, {"worst_point", vec_json(r.worst_point)}};
  c.check("worst margin", r.worst_margin, ">=", -c.number("tol"));
}

json triangle_json(const ComparisonTriangle& t) {
  return {{"pole_angle", t.pole_angle}, {"d_pa", t.d_pa},       {"d_pb", t.d_pb},
          {"l_ab", t.l_ab},             {"angle_a", t.angle_a}, {"angle_b", t.angle_b}};
}

void op_model_triangle(Context& c) {
  const ModelSurface m = c.model();
  const ComparisonTriangle t = comparison_triangle(m, c.number("d_pa"), c.number("d_pb"), c.number("l_ab"));
  c.results = triangle_json(t);
  c.results["model"] = m.describe();
  c.results["von_mangoldt"] = m.von_mangoldt;
}

void op_double_triangle(Context& c) {
  auto sides = [&](const std::string& key) {
    const auto v = json_doubles(c.param(key), key);
    if (v.size() != 3) throw ScenarioError("parameter '" + key + "' must be [d_p_first, d_p_second, base]");
    return TriangleSides{v[0], v[1], v[2]};
  };
  const DoubleTriangleReport r = double_triangle_check(c.model(), sides("first"), sides("second"), c.number("tol"));
  c.results = {{"first", triangle_json(r.first)},
               {"second", triangle_json(r.second)},
               {"summed", triangle_json(r.summed)},
               {"angle_sum_at_y", r.angle_sum_at_y},
               {"precondition", r.precondition},
               {"margin_x", r.margin_x},
               {"margin_z", r.margin_z}};
  c.check("angle sum at y", r.angle_sum_at_y, "<=", kPi + c.number("tol"));
  c.check("margin at x", r.margin_x, ">=", -c.number("tol"));
  c.check("margin at z", r.margin_z, ">=", -c.number("tol"));
}

GeodesicPath require_closed(const Context& c, const Vec& p) {
  const double horizon = c.has("closed_horizon") ? c.number("closed_horizon") : 2.0 * c.scale();
  auto g = find_closed_geodesic(c.s, p, horizon);
  if (!g) throw HypothesisError("no closed geodesic through p of length <= " + csv_number(horizon));
  return *g;
}

void op_ray_perpendicularity(Context& c) {
  const Vec p = c.point("p");
  const GeodesicPath sigma = require_closed(c, p);
  const double t_top = c.number("horizon_multiple") * c.scale();
  const std::vector<double> times = {t_top / 100.0, t_top / 10.0, t_top};
  const RaySearch rs = find_rays(c.s, p, t_top, c.number("ray_tol"), c.integer("resolution"), 8, c.seed);
  const auto rays = rs.rays();
  if (rays.empty()) throw HypothesisError("no ray directions found at the horizon");
  json rows = json::array();
  double worst = 0.0;
  std::ostringstream csv;
  csv << "ray,t,angle,first_variation\n";
  for (size_t k = 0; k < rays.size(); ++k) {
    const PerpendicularityReport r = ray_perpendicularity_probe(c.s, sigma, rays[k], times, c.number("tol"));
    rows.push_back({{"direction", vec_json(rays[k])},
                    {"times", r.times},
                    {"angles", r.angles},
                    {"first_variation", r.first_variation},
                    {"final_deviation", r.final_deviation}});
    for (size_t j = 0; j < r.times.size(); ++j)
      csv << k << ',' << csv_number(r.times[j]) << ',' << csv_number(r.angles[j]) << ','
          << csv_number(r.first_variation[j]) << '\n';
    worst = std::max(worst, r.final_deviation);
  }
  c.results["closed_geodesic"] = closed_json(sigma);
  c.results["rays"] = rows;
  c.results["max_final_deviation"] = worst;
  c.csv("perpendicularity.csv", csv.str());
  c.check("max |angle - pi/2| at the horizon", worst, "<=", c.number("tol"));
}

void op_h_map(Context& c) {
  const Vec p = c.point("p");
  const GeodesicPath sigma = require_closed(c, p);
  const double horizon = c.number("horizon_multiple") * c.scale();
  const RaySearch rs = find_rays(c.s, p, horizon, c.number("ray_tol"), c.integer("resolution"), 8, c.seed);
  const HMapReport h = h_map_check(c.s, sigma, rs.rays(), c.number("tol"));
  c.results["closed_geodesic"] = closed_json(sigma);
  c.results["horizon"] = horizon;
  c.results["ray_fraction"] = rs.fraction;
  c.results["h_values"] = h.values;
  c.results["max_abs_h"] = h.max_abs;
  c.check("max |h| over rays", h.max_abs, "<=", c.number("tol"));
  c.check("ray fraction", rs.fraction, "<=", c.number("max_fraction"));
}

void op_terminal_velocity_probe(Context& c) {
  if (!c.has("direction")) throw ScenarioError("terminal_velocity_probe needs 'direction'");
  const Vec y = json_vec(c.param("direction"), c.s.dim(), "direction");
  const auto times = json_doubles(c.param("times"), "times");
  const TerminalLimitReport r = terminal_velocity_limit_probe(c.s, c.point("p"), y, times);
  c.results = {{"times", r.times}, {"hausdorff", r.hausdorff}, {"set_sizes", r.set_sizes},
               {"non_increasing", r.non_increasing}};
}

void op_ray_cone_volume(Context& c) {
  const Vec p = c.point("p");
  const double horizon = c.has("horizon") ? c.number("horizon") : 200.0 * c.scale();
  const RaySearch rs = find_rays(c.s, p, horizon, c.number("ray_tol"), c.integer("resolution"), 8, c.seed);
  const RayConeVolumes v =
      ray_cone_volume(c.s, p, rs, c.number("delta"), c.number("r"), c.number("lambda"), c.number("v_m"), c.measure());
  c.results = {{"ray", volume_json(v.ray)},          {"non_ray", volume_json(v.non_ray)},
               {"tube", volume_json(v.tube)},        {"comparison", v.comparison},
               {"ray_fraction", v.ray_fraction},     {"tube_ratio", v.tube_ratio},
               {"split_holds", v.split_holds},       {"direction_fraction", rs.fraction}};
}

void op_main_theorem_probe(Context& c) {
  const Vec p = c.point("p");
  SampleSpec region = c.region(c.integer("curvature_points"), 4);
  region.center = p;
  // Preconditions: reversible, Berwald, non-negative flag curvature on samples.
  const double rho = reversibility_constant(c.s, region);
  const BerwaldReport b = is_berwald(c.s, region);
  double min_k = std::numeric_limits<double>::infinity();
  for (const Vec& x : sample_points(c.s, region)) {
    const auto dirs = sample_directions(c.s.dim(), 2, c.seed + 29);
    try {
      min_k = std::min(min_k, flag_curvature(c.s, {x, dirs[0], dirs[1]}));
    } catch (const DegenerateError&) {
    }
  }
  json pre = {{"reversibility_constant", rho}, {"is_berwald", b.berwald}, {"min_flag_curvature", min_k}};
  if (rho > 1.0 + 1e-6) throw HypothesisError("main-theorem-probe: structure is not reversible (rho = " + csv_number(rho) + ")");
  if (!b.berwald) throw HypothesisError("main-theorem-probe: structure fails the Berwald test");
  if (!(min_k >= -1e-6)) throw HypothesisError("main-theorem-probe: negative flag curvature sampled");

  const double horizon = c.number("horizon_multiple") * c.scale();
  const auto closed = find_closed_geodesic(c.s, p, horizon, c.integer("directions"));
  const ComparisonParams params{0.0, 0.0, c.s.dim()};
  const VolumeReport v =
      volume_growth_estimate(c.s, p, params, linspace_to(horizon, c.integer("radii_count")), c.integer("window"),
                             c.measure());
  c.results["preconditions"] = pre;
  c.results["horizon"] = horizon;
  c.results["closed_geodesic"] = closed_json(closed);
  c.results["volume_growth"] = volume_report_json(v);
  c.csv("ratio_curve.csv", ratio_csv(v));
  if (closed) {
    c.results["conclusion"] = "closed geodesic found; v_M must vanish";
    c.check("v_M at horizon", v.v_m, "<=", c.number("threshold"));
  } else {
    c.results["conclusion"] = "no closed geodesic at horizon; v_M may be positive";
  }
  if (c.has("expect_closed"))
    c.check("closed geodesic found as expected", closed.has_value() == c.param("expect_closed").get<bool>() ? 1.0 : 0.0,
            "==", 1.0);
  if (c.has("expect_v_m")) {
    const double e = c.number("expect_v_m");
    c.check("v_M near expected", std::abs(v.v_m - e), "<=", c.number("tol") * e);
  }
}

// ---------------------------------------------------------------------------
// Registry

struct Operation {
  OperationInfo info;
  std::function<void(Context&)> run;
};

json region_defaults(json d) {
  d["center"] = nullptr;
  d["region_radius"] = 0.5;
  return d;
}

json measure_defaults(json d) {
  d["method"] = "auto";
  d["samples"] = 1000000;
  return d;
}

const std::vector<Operation>& operations() {
  static const std::vector<Operation> ops = [] {
    const json model = {{"kappa", 0.0}};
    std::vector<Operation> v;
    v.push_back({{"validate_structure", "tensor axioms: homogeneity, Euler identity, positive definiteness, Cartan symmetry",
                  true, true,
                  region_defaults({{"points", 20}, {"directions", 10}, {"tol_exact", 1e-8}, {"tol_fd", 1e-6}})},
                 op_validate_structure});
    v.push_back({{"curvature_survey", "flag curvature at random flags", true, false,
                  region_defaults({{"flags", 100}, {"expected_K", nullptr}, {"tol", 1e-4}})},
                 op_curvature_survey});
    v.push_back({{"berwald_check", "Berwald test with S-curvature and tangential curvature witnesses", true, true,
                  region_defaults({{"points", 20}, {"directions", 10}, {"tol", 1e-6}, {"witness_min", 1e-2}})},
                 op_berwald_check});
    v.push_back({{"reversibility", "sampled reversibility constant", true, false,
                  region_defaults({{"points", 20}, {"directions", 16}})},
                 op_reversibility});
    v.push_back({{"geodesic", "integrate one geodesic", false, false,
                  {{"x0", nullptr}, {"y0", nullptr}, {"t_end", 1.0}}},
                 op_geodesic});
    v.push_back({{"distance", "forward and backward distance", false, true, {{"p", nullptr}, {"q", nullptr}}},
                 op_distance});
    v.push_back({{"ball_volume", "Busemann-Hausdorff volumes of forward balls", true, false,
                  measure_defaults({{"p", nullptr}, {"radii", {1.0, 5.0, 20.0}}, {"expect_ratio", nullptr},
                                    {"tol", 0.01}})},
                 op_ball_volume});
    v.push_back({{"volume_growth", "ball-to-comparison ratio curve and v_M", true, false,
                  measure_defaults({{"p", nullptr}, {"radii", nullptr}, {"r_max", nullptr}, {"count", 20},
                                    {"window", 3}, {"kappa", 0.0}, {"lambda", 0.0}, {"expect_v_m", nullptr},
                                    {"max_v_m", nullptr}, {"tol", 0.02}})},
                 op_volume_growth});
    v.push_back({{"volume_comparison", "annulus volume comparison on a radii grid", true, true,
                  region_defaults(measure_defaults({{"p", nullptr},
                                                    {"radii", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}},
                                                    {"kappa", 0.0},
                                                    {"lambda", 0.0},
                                                    {"points", 10},
                                                    {"directions", 6}}))},
                 op_volume_comparison});
    v.push_back({{"find_rays", "finite-horizon ray directions", true, false,
                  {{"p", nullptr}, {"horizon", nullptr}, {"tol", 1e-3}, {"resolution", 720}, {"t_samples", 8},
                   {"max_fraction", nullptr}}},
                 op_find_rays});
    v.push_back({{"closed_geodesic", "search for a closed geodesic through p", false, false,
                  {{"p", nullptr}, {"horizon", nullptr}, {"directions", 64}, {"expect_found", nullptr}}},
                 op_closed_geodesic});
    v.push_back({{"toponogov", "forward/backward angles against model comparison triangles", true, true,
                  region_defaults({{"triangles", 50},
                                   {"model", model},
                                   {"tol", 1e-3},
                                   {"expect", "holds"},
                                   {"strict_floor", 1e-6},
                                   {"min_area", 0.02},
                                   {"max_skipped", 0}})},
                 op_toponogov});
    v.push_back({{"angle_crosscheck", "limit-quotient angle against the first variation angle", true, true,
                  region_defaults({{"configurations", 50}, {"path_length", 0.2}, {"tol", 1e-3}})},
                 op_angle_crosscheck});
    v.push_back({{"angle_monotonicity", "comparison angle along a geodesic", false, true,
                  {{"p", nullptr}, {"a", nullptr}, {"direction", nullptr}, {"times", {0.25, 0.5, 0.75, 1.0}},
                   {"model", model}, {"tol", 1e-3}}},
                 op_angle_monotonicity});
    v.push_back({{"radial_bound", "radial flag curvature against the model curvature", true, true,
                  region_defaults({{"p", nullptr}, {"model", model}, {"points", 20}, {"directions", 4},
                                   {"tol", 1e-6}})},
                 op_radial_bound});
    v.push_back({{"model_triangle", "comparison triangle on a model surface", false, false,
                  {{"model", model}, {"d_pa", 1.0}, {"d_pb", 1.0}, {"l_ab", 1.0}}},
                 op_model_triangle});
    v.push_back({{"double_triangle", "double triangle lemma on a model surface", false, true,
                  {{"model", model}, {"first", {1.0, 1.0, 1.0}}, {"second", {1.0, 1.0, 1.0}}, {"tol", 1e-6}}},
                 op_double_triangle});
    v.push_back({{"ray_perpendicularity", "angle between rays and a closed geodesic", true, true,
                  {{"p", nullptr}, {"closed_horizon", nullptr}, {"horizon_multiple", 100.0}, {"ray_tol", 1e-3},
                   {"resolution", 720}, {"tol", 0.05}}},
                 op_ray_perpendicularity});
    // The ray proxy's relative slack admits directions up to ~√(2·ray_tol) off
    // a true ray, which is what h measures; 1e-5 keeps that below 0.005.
    v.push_back({{"h_map", "h(v) on ray directions and the ray fraction", true, true,
                  {{"p", nullptr}, {"closed_horizon", nullptr}, {"horizon_multiple", 200.0}, {"ray_tol", 1e-5},
                   {"resolution", 720}, {"tol", 0.02}, {"max_fraction", 0.05}}},
                 op_h_map});
    v.push_back({{"terminal_velocity_probe", "terminal velocities along a ray", false, false,
                  {{"p", nullptr}, {"direction", nullptr}, {"times", {1.0, 10.0, 100.0}}}},
                 op_terminal_velocity_probe});
    v.push_back({{"ray_cone_volume", "ball volume split into ray and non-ray cones", true, false,
                  measure_defaults({{"p", nullptr}, {"horizon", nullptr}, {"ray_tol", 1e-3}, {"resolution", 720},
                                    {"delta", 0.05}, {"r", 10.0}, {"lambda", 0.0}, {"v_m", 0.0}})},
                 op_ray_cone_volume});
    v.push_back({{"main-theorem-probe", "closed geodesic search and volume growth", true, true,
                  region_defaults(measure_defaults({{"p", nullptr},
                                                    {"horizon_multiple", 100.0},
                                                    {"threshold", 0.05},
                                                    {"radii_count", 20},
                                                    {"window", 3},
                                                    {"directions", 64},
                                                    {"curvature_points", 20},
                                                    {"expect_closed", nullptr},
                                                    {"expect_v_m", nullptr},
                                                    {"tol", 0.02}}))},
                 op_main_theorem_probe});
    return v;
  }();
  return ops;
}

const Operation& find_operation(const std::string& name) {
  for (const Operation& op : operations())
    if (op.info.name == name) return op;
  throw ScenarioError("unknown operation '" + name + "'");
}

bool same_kind(const json& value, const json& def) {
  if (def.is_null()) return true;
  if (def.is_number()) return value.is_number();
  return value.type() == def.type();
}

void line_column(const std::string& text, std::size_t byte, int& line, int& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

}  // namespace

const std::vector<OperationInfo>& operation_catalog() {
  static const std::vector<OperationInfo> infos = [] {
    std::vector<OperationInfo> out;
    for (const Operation& op : operations()) out.push_back(op.info);
    return out;
  }();
  return infos;
}

Scenario parse_scenario(const json& doc, std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  static const std::vector<std::string> reserved = {"name",     "fixture", "fixture_params", "operation", "op",
                                                    "params",   "seed",    "csv",            "schema_version"};
  Scenario sc;
  sc.source = doc;
  if (doc.contains("name")) sc.name = doc["name"].get<std::string>();

  const json* fixture = doc.contains("fixture") ? &doc["fixture"] : nullptr;
  if (!fixture) throw ScenarioError("scenario needs a 'fixture'");
  if (fixture->is_string()) {
    sc.fixture = fixture->get<std::string>();
    if (doc.contains("fixture_params")) sc.fixture_params = doc["fixture_params"];
  } else if (fixture->is_object() && fixture->contains("key")) {
    sc.fixture = (*fixture)["key"].get<std::string>();
    if (fixture->contains("params")) sc.fixture_params = (*fixture)["params"];
  } else {
    throw ScenarioError("'fixture' must be a registry key or {\"key\": ..., \"params\": {...}}");
  }
  if (!sc.fixture_params.is_object()) throw ScenarioError("fixture parameters must be an object");
  const auto& cat = fixture_catalog();
  if (std::none_of(cat.begin(), cat.end(), [&](const FixtureInfo& f) { return f.key == sc.fixture; }))
    throw ScenarioError("unknown fixture '" + sc.fixture + "'");

  if (doc.contains("operation")) sc.operation = doc["operation"].get<std::string>();
  else if (doc.contains("op")) sc.operation = doc["op"].get<std::string>();
  else throw ScenarioError("scenario needs an 'operation'");
  const Operation& op = find_operation(sc.operation);

  json given = json::object();
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw ScenarioError("'params' must be an object");
    given = doc["params"];
  }
  // Operation parameters may also sit at the top level.
  for (const auto& [key, value] : doc.items())
    if (std::find(reserved.begin(), reserved.end(), key) == reserved.end()) {
      if (given.contains(key)) throw ScenarioError("parameter '" + key + "' given twice");
      given[key] = value;
    }
  sc.params = op.info.defaults;
  for (const auto& [key, value] : given.items()) {
    if (!op.info.defaults.contains(key))
      throw ScenarioError("operation '" + sc.operation + "' has no parameter '" + key + "'");
    if (!value.is_null() && !same_kind(value, op.info.defaults[key]))
      throw ScenarioError("parameter '" + key + "' has the wrong type");
    sc.params[key] = value;
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ScenarioError("'seed' must be a non-negative integer");
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  if (seed_override) sc.seed = seed_override;
  if (op.info.sampled && !sc.seed) throw ScenarioError("operation '" + sc.operation + "' is sampled and needs a seed");
  if (doc.contains("csv")) sc.write_csv = doc["csv"].get<bool>();
  return sc;
}

Scenario parse_scenario_text(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 0;
    int column = 0;
    line_column(text, e.byte == 0 ? 0 : e.byte - 1, line, column);
    throw ScenarioError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                            e.what(),
                        line, column);
  }
  try {
    return parse_scenario(doc, seed_override);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
}

RunReport run_scenario(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  const FinslerStructure s = make_fixture(sc.fixture, sc.fixture_params);
  const Operation& op = find_operation(sc.operation);
  Context ctx{sc, s, sc.seed.value_or(0)};
  op.run(ctx);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunReport run;
  json scenario = sc.source;
  scenario["seed"] = sc.seed ? json(*sc.seed) : json(nullptr);
  scenario["resolved_params"] = sc.params;
  bool pass = true;
  for (const auto& c : ctx.criteria) pass = pass && c["pass"].get<bool>();
  const bool is_check = !ctx.criteria.empty();
  run.report = {{"schema_version", kReportSchema},
                {"scenario", scenario},
                {"results", ctx.results},
                {"verdict",
                 {{"check", is_check}, {"pass", pass}, {"criteria", ctx.criteria}}},
                {"provenance",
                 {{"toolkit", "finsler-lab"},
                  {"version", FINSLER_LAB_VERSION},
                  {"seed", sc.seed ? json(*sc.seed) : json(nullptr)},
                  {"threads", thread_limit()},
                  {"seconds", seconds}}}};
  run.artifacts = std::move(ctx.artifacts);
  run.status = pass ? Status::kPass : Status::kCheckFailed;
  return run;
}

std::string results_digest(const RunReport& run) { return run.report.at("results").dump(); }

json scenario_schema() {
  json ops = json::array();
  json variants = json::array();
  for (const OperationInfo& op : operation_catalog()) {
    ops.push_back(op.name);
    json props = json::object();
    for (const auto& [key, def] : op.defaults.items()) {
      json p = {{"default", def}};
      if (def.is_number()) p["type"] = "number";
      else if (def.is_string()) p["type"] = "string";
      else if (def.is_array()) p["type"] = "array";
      else if (def.is_object()) p["type"] = "object";
      else if (def.is_boolean()) p["type"] = "boolean";
      props[key] = p;
    }
    variants.push_back({{"if", {{"properties", {{"operation", {{"const", op.name}}}}}}},
                        {"then",
                         {{"description", op.summary},
                          {"properties", {{"params", {{"type", "object"}, {"properties", props},
                                                      {"additionalProperties", false}}}}},
                          {"required", op.sampled ? json::array({"seed"}) : json::array()}}}});
  }
  json fixtures = json::array();
  for (const FixtureInfo& f : fixture_catalog()) fixtures.push_back(f.key);
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"$id", "finsler-lab/scenario/1"},
          {"title", "finsler-lab scenario"},
          {"type", "object"},
          {"required", {"fixture", "operation"}},
          {"properties",
           {{"name", {{"type", "string"}}},
            {"fixture",
             {{"oneOf",
               {{{"enum", fixtures}},
                {{"type", "object"},
                 {"required", {"key"}},
                 {"properties", {{"key", {{"enum", fixtures}}}, {"params", {{"type", "object"}}}}}}}}}},
            {"fixture_params", {{"type", "object"}}},
            {"operation", {{"enum", ops}}},
            {"op", {{"enum", ops}, {"description", "alias of operation"}}},
            {"params", {{"type", "object"}}},
            {"seed", {{"type", "integer"}, {"minimum", 0}}},
            {"csv", {{"type", "boolean"}, {"default", true}}}}},
          {"allOf", variants}};
}

std::string fixture_table() {
  std::ostringstream out;
  out << std::left << std::setw(17) << "key" << std::setw(5) << "dim" << "properties\n";
  for (const FixtureInfo& f : fixture_catalog()) {
    out << std::left << std::setw(17) << f.key << std::setw(5) << f.dim << f.properties << '\n';
    out << std::setw(22) << "" << "params " << f.params_schema << '\n';
  }
  return out.str();
}

}  // namespace finsler::lab
