#pragma once

#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

/// Fixed node set on the Euclidean unit sphere S^{n-1}.
///
/// n = 2: 512-node periodic trapezoid rule. n = 3: 24-point Gauss–Legendre in
/// the height coordinate times a 48-node azimuthal trapezoid (1152 nodes).
/// n = 4: 4096 quasi-random Gaussian-normalized directions from a fixed seed.
struct SphereRule {
  int dim = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  bool randomized = false;
};

/// Shared immutable rule for dimension n (thread-safe static initialization).
const SphereRule& sphere_rule(int n);

/// Lebesgue measure of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

/// (n−1)-measure of the Euclidean unit sphere S^{n-1}.
double unit_sphere_area(int n);

}  // namespace finsler
