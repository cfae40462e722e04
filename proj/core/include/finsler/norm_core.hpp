#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler {

/// g_y at (x, y): symmetric positive definite for a valid structure.
struct FundamentalTensor {
  Mat matrix;
  TangentVector at;
};

/// F(x, y). Throws DomainError outside the chart and Error when the evaluator
/// returns a non-finite value.
double eval_norm(const FinslerStructure& s, const TangentVector& v);

/// g_y(u, v) = ½ ∂²/∂s∂t F²(y + su + tv), computed with hyper-dual numbers.
/// Throws DegenerateError for y = 0 or when g_y is not positive definite.
FundamentalTensor fundamental_tensor(const FinslerStructure& s, const TangentVector& v);

/// Same as fundamental_tensor without the positive-definiteness check; used by
/// diagnostics that need to look at a failing tensor.
Mat fundamental_matrix_unchecked(const FinslerStructure& s, const Vec& x, const Vec& y);

/// C_y(u1, u2, u3) = ½ d/dt g_{y + t u3}(u1, u2) at t = 0 (central difference
/// of the exact fundamental tensor, step 1e-5·|y|, Richardson-extrapolated).
double cartan_tensor(const FinslerStructure& s, const TangentVector& v, const Vec& u1, const Vec& u2, const Vec& u3);

/// F*(ω) = max over the indicatrix of ω(u).
double dual_norm(const FinslerStructure& s, const Covector& omega);

/// The unique y with ω(y) = F*(ω)² and F(y) = F*(ω). Throws DegenerateError
/// for ω = 0 and ConvergenceError if stationarity 1e-10 is not reached.
TangentVector legendre_transform(const FinslerStructure& s, const Covector& omega);

/// ∇u(x) = legendre_transform(Du(x)); the zero covector maps to the zero vector.
TangentVector gradient_field(const FinslerStructure& s, const std::function<double(const Vec&)>& u, const Vec& x);

/// sup F(−y)/F(y) over sampled indicatrix directions at sampled points,
/// refined by local maximization. Always ≥ 1 up to rounding.
double reversibility_constant(const FinslerStructure& s, const SampleSpec& spec);

/// Quasi-uniform Euclidean directions θ rescaled onto the indicatrix, θ/F(x, θ).
std::vector<TangentVector> indicatrix_sample(const FinslerStructure& s, const Vec& x, int count, std::uint64_t seed);

struct AxiomCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;  ///< worst observed value of the diagnostic
  Vec witness_x;       ///< sample where `worst` occurred
  Vec witness_y;
};

struct ValidationReport {
  AxiomCheck smoothness;   ///< F1 proxy: second difference quotients agree across step sizes
  AxiomCheck homogeneity;  ///< F2: max |F(λy) − λF(y)| / (λF(y))
  AxiomCheck positivity;   ///< min F(y) over Euclidean-unit y
  AxiomCheck convexity;    ///< F3: min eigenvalue of g_y relative to its largest
  [[nodiscard]] bool all_pass() const { return smoothness.pass && homogeneity.pass && positivity.pass && convexity.pass; }
};

/// Sampled diagnostics for the axioms F1–F3. Never throws on axiom failure.
ValidationReport validate_structure(const FinslerStructure& s, const SampleSpec& spec);

}  // namespace finsler
