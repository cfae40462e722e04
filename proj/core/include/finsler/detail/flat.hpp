#pragma once

// Exact lattice minimization for translation-invariant structures. With a
// Minkowski norm F on R^n and deck lattice Λ, d(p, q) = min_{k ∈ Λ} F(q − p + k).

#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler::detail {

/// z + k* with k* minimizing F(z + k) over the lattice. For a rank-one lattice
/// c ↦ F(z + c·w) is convex, so the integer minimizer is adjacent to the real
/// one; for a full-rank lattice only translations with F(k) ≤ (1 + ρ)·R can
/// win, where R bounds F on the fundamental cell and ρ bounds F(−z)/F(z).
Vec flat_min_displacement(const FinslerStructure& s, const Vec& z);

/// Every z + k with F(z + k) ≤ (1 + tol)·min.
std::vector<Vec> flat_near_min_displacements(const FinslerStructure& s, const Vec& z, double tol);

/// Nonzero translations that can bound the Dirichlet domain
/// {z : F(z) ≤ F(z + k) for all k}; the cut time of a ray is decided by these.
std::vector<Vec> relevant_translations(const FinslerStructure& s);

/// Cut time along t ↦ t·u (F(u) = 1): sup{t : F(t u) ≤ F(t u + k) for all k},
/// +∞ without a lattice.
double flat_cut_time(const FinslerStructure& s, const Vec& u, const std::vector<Vec>& relevant);

}  // namespace finsler::detail
