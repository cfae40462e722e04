#pragma once

#include <string>
#include <utility>
#include <vector>

#include "finsler/fixtures.hpp"

namespace finsler::test {

/// The shipped registry, built with default parameters.
inline const std::vector<std::pair<std::string, FinslerStructure>>& all_fixtures() {
  static const auto fixtures = [] {
    std::vector<std::pair<std::string, FinslerStructure>> out;
    for (const FixtureInfo& f : fixture_catalog()) out.emplace_back(f.key, make_fixture(f.key));
    return out;
  }();
  return fixtures;
}

/// Randers structure with an x-dependent one-form; not Berwald.
inline FinslerStructure curled_randers() { return randers(Vec{0.2, 0.0}, 0.3); }

inline MinkowskiSpec quartic(double eps = 0.5) {
  MinkowskiSpec m;
  m.kind = MinkowskiSpec::Kind::kQuartic;
  m.quartic_eps = eps;
  return m;
}

}  // namespace finsler::test
