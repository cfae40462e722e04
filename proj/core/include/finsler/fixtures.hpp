#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/structure.hpp"

namespace finsler {

/// Minkowski norms used on the flat fixtures.
struct MinkowskiSpec {
  enum class Kind { kEuclidean, kQuartic, kRanders };
  Kind kind = Kind::kEuclidean;
  double quartic_eps = 0.5;  ///< F⁴ = |y|⁴ + ε Σ (y^i)⁴
  Vec drift;                 ///< Randers one-form b, |b| < 1
};

FinslerStructure euclidean(int dim = 2);
/// Round sphere of the given radius in stereographic coordinates from the north pole.
FinslerStructure riemann_sphere(double radius = 1.0);
/// Poincaré disk model, curvature −1.
FinslerStructure hyperbolic_disk();
/// F = |y| + b(x)·y with b(x) = b + curl·(−x², x¹). curl = 0 gives a Minkowski plane.
FinslerStructure randers(const Vec& b, double curl = 0.0);
/// Funk metric on the unit disk (flag curvature −1/4, not reversible, not Berwald).
FinslerStructure funk_disk();
/// R × (R / L·Z): the second coordinate wraps with period `circumference`.
FinslerStructure flat_cylinder(double circumference = 1.0, const MinkowskiSpec& norm = {});
/// R² / (L1·Z × L2·Z).
FinslerStructure flat_torus(double l1 = 1.0, double l2 = 1.0, const MinkowskiSpec& norm = {});

struct FixtureInfo {
  std::string key;
  int dim = 2;
  std::string params_schema;  ///< JSON object describing accepted parameters
  std::string properties;     ///< reversibility, Berwald, curvature sign
};

/// The shipped fixture registry, in display order.
const std::vector<FixtureInfo>& fixture_catalog();

/// Build a fixture from its registry key and JSON parameter object.
/// Throws DomainError for unknown keys or invalid parameters.
FinslerStructure make_fixture(const std::string& key, const nlohmann::json& params = nlohmann::json::object());

}  // namespace finsler
