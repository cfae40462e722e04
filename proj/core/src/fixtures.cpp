#include "finsler/fixtures.hpp"

#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

template <class T>
T sq_norm(std::span<const T> v) {
  T s(0.0);
  for (const T& c : v) s += c * c;
  return s;
}

template <class T>
T dot_span(std::span<const T> a, std::span<const T> b) {
  T s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct EuclideanNorm {
  template <class T>
  T operator()(std::span<const T> /*x*/, std::span<const T> y) const {
    using std::sqrt;
    return sqrt(sq_norm(y));
  }
};

/// λ(x)|y| with λ = 2R / (1 + |x|²).
struct StereographicSphereNorm {
  double radius;
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    return (2.0 * radius) / (1.0 + sq_norm(x)) * sqrt(sq_norm(y));
  }
};

struct PoincareNorm {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    return 2.0 / (1.0 - sq_norm(x)) * sqrt(sq_norm(y));
  }
};

struct RandersNorm {
  Vec b;
  double curl;
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    T beta(0.0);
    for (size_t i = 0; i < y.size(); ++i) beta += b[static_cast<int>(i)] * y[i];
    if (curl != 0.0) beta += curl * (x[0] * y[1] - x[1] * y[0]);
    return sqrt(sq_norm(y)) + beta;
  }
};

struct FunkNorm {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    const T xx = sq_norm(x);
    const T xy = dot_span(x, y);
    const T yy = sq_norm(y);
    return (sqrt(yy * (1.0 - xx) + xy * xy) + xy) / (1.0 - xx);
  }
};

struct QuarticNorm {
  double eps;
  template <class T>
  T operator()(std::span<const T> /*x*/, std::span<const T> y) const {
    using std::sqrt;
    const T yy = sq_norm(y);
    T quart(0.0);
    for (const T& c : y) quart += c * c * c * c;
    return sqrt(sqrt(yy * yy + eps * quart));
  }
};

std::shared_ptr<const NormFunction> minkowski_norm(const MinkowskiSpec& spec, int dim) {
  switch (spec.kind) {
    case MinkowskiSpec::Kind::kEuclidean:
      return make_norm(EuclideanNorm{});
    case MinkowskiSpec::Kind::kQuartic:
      if (!(spec.quartic_eps > -0.5)) throw DomainError("quartic norm: eps must exceed -0.5");
      return make_norm(QuarticNorm{spec.quartic_eps});
    case MinkowskiSpec::Kind::kRanders: {
      if (spec.drift.size() != dim) throw DomainError("randers norm: drift has wrong dimension");
      if (!(euclidean_norm(spec.drift) < 1.0)) throw DomainError("randers norm: |b| must be < 1");
      return make_norm(RandersNorm{spec.drift, 0.0});
    }
  }
  throw DomainError("unknown Minkowski norm kind");
}

StructureTraits minkowski_traits(const MinkowskiSpec& spec, double scale) {
  StructureTraits t;
  t.translation_invariant = true;
  t.reversible = spec.kind != MinkowskiSpec::Kind::kRanders || euclidean_norm(spec.drift) == 0.0;
  t.berwald = true;
  t.curvature_sign = "K=0";
  t.scale = scale;
  return t;
}

std::string minkowski_tag(const MinkowskiSpec& spec) {
  switch (spec.kind) {
    case MinkowskiSpec::Kind::kEuclidean:
      return "euclidean";
    case MinkowskiSpec::Kind::kQuartic:
      return "quartic";
    case MinkowskiSpec::Kind::kRanders:
      return "randers";
  }
  return "?";
}

Vec vec_param(const nlohmann::json& j, const char* key, Vec fallback) {
  if (!j.contains(key)) return fallback;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.empty() || arr.size() > kMaxDim)
    throw DomainError(std::string("parameter '") + key + "' must be a short numeric array");
  Vec v(static_cast<int>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
  return v;
}

double num_param(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw DomainError(std::string("parameter '") + key + "' must be a number");
  return j.at(key).get<double>();
}

MinkowskiSpec minkowski_param(const nlohmann::json& j) {
  MinkowskiSpec spec;
  const std::string kind = j.value("norm", std::string("euclidean"));
  if (kind == "euclidean") {
    spec.kind = MinkowskiSpec::Kind::kEuclidean;
  } else if (kind == "quartic") {
    spec.kind = MinkowskiSpec::Kind::kQuartic;
    spec.quartic_eps = num_param(j, "eps", 0.5);
  } else if (kind == "randers") {
    spec.kind = MinkowskiSpec::Kind::kRanders;
    spec.drift = vec_param(j, "b", Vec{0.5, 0.0});
  } else {
    throw DomainError("unknown Minkowski norm '" + kind + "' (expected euclidean, quartic or randers)");
  }
  return spec;
}

void reject_unknown(const nlohmann::json& params, std::initializer_list<const char*> allowed, const std::string& key) {
  if (!params.is_object()) throw DomainError("fixture '" + key + "': parameters must be a JSON object");
  for (const auto& [name, value] : params.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || name == a;
    if (!ok) throw DomainError("fixture '" + key + "': unknown parameter '" + name + "'");
  }
}

}  // namespace

FinslerStructure euclidean(int dim) {
  StructureTraits t;
  t.translation_invariant = true;
  t.reversible = true;
  t.berwald = true;
  t.curvature_sign = "K=0";
  return FinslerStructure(dim, make_norm(EuclideanNorm{}), nullptr, {}, "euclidean", t);
}

FinslerStructure riemann_sphere(double radius) {
  if (!(radius > 0.0)) throw DomainError("riemann-sphere: radius must be positive");
  StructureTraits t;
  t.reversible = true;
  t.berwald = true;
  t.curvature_sign = "K=1/R^2";
  t.scale = radius;
  return FinslerStructure(2, make_norm(StereographicSphereNorm{radius}), nullptr, {}, "riemann-sphere", t);
}

FinslerStructure hyperbolic_disk() {
  StructureTraits t;
  t.reversible = true;
  t.berwald = true;
  t.curvature_sign = "K=-1";
  return FinslerStructure(
      2, make_norm(PoincareNorm{}), [](const Vec& x) { return dot(x, x) < 1.0; }, {}, "hyperbolic-disk", t);
}

FinslerStructure randers(const Vec& b, double curl) {
  const int n = b.size();
  if (n < 2) throw DomainError("randers: b must have at least two components");
  if (curl != 0.0 && n != 2) throw DomainError("randers: curl is only defined in the plane");
  if (!(euclidean_norm(b) < 1.0)) throw DomainError("randers: |b| must be < 1 for a positive norm");
  StructureTraits t;
  t.translation_invariant = curl == 0.0;
  t.reversible = euclidean_norm(b) == 0.0 && curl == 0.0;
  t.berwald = curl == 0.0;
  t.curvature_sign = curl == 0.0 ? "K=0" : "mixed";
  auto domain = [b, curl](const Vec& x) {
    if (curl == 0.0) return true;
    const Vec bx = b + curl * Vec{-x[1], x[0]};
    return euclidean_norm(bx) < 0.999;
  };
  return FinslerStructure(n, make_norm(RandersNorm{b, curl}), domain, {}, "randers", t);
}

FinslerStructure funk_disk() {
  StructureTraits t;
  t.reversible = false;
  t.berwald = false;
  t.curvature_sign = "K=-1/4";
  return FinslerStructure(
      2, make_norm(FunkNorm{}), [](const Vec& x) { return dot(x, x) < 1.0; }, {}, "funk-disk", t);
}

FinslerStructure flat_cylinder(double circumference, const MinkowskiSpec& norm) {
  if (!(circumference > 0.0)) throw DomainError("flat-cylinder: circumference must be positive");
  return FinslerStructure(2, minkowski_norm(norm, 2), nullptr, {Vec{0.0, circumference}},
                          "flat-cylinder/" + minkowski_tag(norm), minkowski_traits(norm, circumference));
}

FinslerStructure flat_torus(double l1, double l2, const MinkowskiSpec& norm) {
  if (!(l1 > 0.0 && l2 > 0.0)) throw DomainError("flat-torus: periods must be positive");
  return FinslerStructure(2, minkowski_norm(norm, 2), nullptr, {Vec{l1, 0.0}, Vec{0.0, l2}},
                          "flat-torus/" + minkowski_tag(norm), minkowski_traits(norm, std::max(l1, l2)));
}

const std::vector<FixtureInfo>& fixture_catalog() {
  static const std::vector<FixtureInfo> catalog = {
      {"euclidean", 2, R"({"dim": "integer 2..4, default 2"})", "reversible, Berwald, K≡0"},
      {"riemann-sphere", 2, R"({"radius": "number > 0, default 1"})",
       "reversible, Berwald (Riemannian), K≡1/R², stereographic chart"},
      {"hyperbolic-disk", 2, R"({})", "reversible, Berwald (Riemannian), K≡-1, Poincaré disk chart"},
      {"randers", 2, R"({"b": "[b1, b2], |b| < 1, default [0.5, 0]", "curl": "number, default 0"})",
       "non-reversible (ρ=(1+|b|)/(1-|b|)), Berwald iff curl=0, K≡0 iff curl=0"},
      {"funk-disk", 2, R"({})", "non-reversible, non-Berwald, K≡-1/4, S=(3/2)F"},
      {"flat-cylinder", 2,
       R"({"circumference": "number > 0, default 1", "norm": "euclidean|quartic|randers", "eps": "quartic weight", "b": "randers drift"})",
       "reversible, Berwald, K≡0 (euclidean/quartic norm)"},
      {"flat-torus", 2,
       R"({"l1": "number > 0, default 1", "l2": "number > 0, default 1", "norm": "euclidean|quartic|randers", "eps": "quartic weight", "b": "randers drift"})",
       "reversible, Berwald, K≡0 (euclidean/quartic norm)"},
  };
  return catalog;
}

FinslerStructure make_fixture(const std::string& key, const nlohmann::json& params) {
  try {
    if (key == "euclidean") {
      reject_unknown(params, {"dim"}, key);
      return euclidean(params.value("dim", 2));
    }
    if (key == "riemann-sphere") {
      reject_unknown(params, {"radius"}, key);
      return riemann_sphere(num_param(params, "radius", 1.0));
    }
    if (key == "hyperbolic-disk") {
      reject_unknown(params, {}, key);
      return hyperbolic_disk();
    }
    if (key == "randers") {
      reject_unknown(params, {"b", "curl"}, key);
      return randers(vec_param(params, "b", Vec{0.5, 0.0}), num_param(params, "curl", 0.0));
    }
    if (key == "funk-disk") {
      reject_unknown(params, {}, key);
      return funk_disk();
    }
    if (key == "flat-cylinder") {
      reject_unknown(params, {"circumference", "norm", "eps", "b"}, key);
      return flat_cylinder(num_param(params, "circumference", 1.0), minkowski_param(params));
    }
    if (key == "flat-torus") {
      reject_unknown(params, {"l1", "l2", "norm", "eps", "b"}, key);
      return flat_torus(num_param(params, "l1", 1.0), num_param(params, "l2", 1.0), minkowski_param(params));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("fixture '" + key + "': " + e.what());
  }
  throw DomainError("unknown fixture '" + key + "'");
}

}  // namespace finsler
