#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "finsler/geodesics.hpp"
#include "finsler/linalg.hpp"
#include "finsler/structure.hpp"

namespace finsler {

/// sin(√κ t), t, or sinh(√−κ t).
double s_kappa(double kappa, double t);

struct ComparisonParams {
  double kappa = 0.0;   ///< lower bound: Ric ≥ (n−1)κ
  double lambda = 0.0;  ///< upper bound: ‖S‖ ≤ λ
  int n = 2;
};

/// V^{κ,λ}_{r,R}(Σ) = |Σ| ∫_r^R e^{λt} s_κ(t)^{n−1} dt, where |Σ| is the
/// (n−1)-measure of Σ on the unit sphere.
double comparison_volume(const ComparisonParams& params, double r, double R, double sigma_measure);

/// Value with a Monte Carlo standard error (zero for exact evaluations).
struct VolumeEstimate {
  double value = 0.0;
  double se = 0.0;
  bool exact = false;
};

/// Predicate on unit (F = 1) initial velocities at p.
using DirectionSet = std::function<bool(const Vec&)>;

struct MeasureOptions {
  enum class Method { kAuto, kMonteCarlo, kExact };
  Method method = Method::kAuto;  ///< kAuto: exact on translation-invariant structures
  long samples = 1000000;
  std::uint64_t seed = 1;
  double step = 0.0;  ///< RK4 step along curved polar geodesics; 0 picks r_max / 400
};

/// Busemann–Hausdorff volume in geodesic polar coordinates about p, valid up
/// to r_max. A point at distance t in direction θ contributes only while the
/// polar geodesic is still minimizing, so annuli are taken along minimal
/// geodesics.
///
/// Flat structures: the density is τ t^{n−1} F(u)^{−n} up to the exact cut
/// time. Curved planar charts: one geodesic per direction stratum carries its
/// angular Jacobian, cut off at the first conjugate point. The Monte Carlo
/// draw is stratified in (direction, radius) and reused by every query, so
/// comparisons between annuli share random numbers.
class PolarVolume {
 public:
  PolarVolume(const FinslerStructure& s, Vec p, double r_max, const MeasureOptions& opts = {});

  struct Term {
    double r = 0.0;
    double R = 0.0;
    double coef = 1.0;
    DirectionSet gamma;  ///< empty: the whole indicatrix
  };

  /// Σ coef · vol(A^Γ_{r,R}(p)) with its standard error.
  [[nodiscard]] VolumeEstimate combination(const std::vector<Term>& terms) const;
  [[nodiscard]] VolumeEstimate annulus(double r, double R, const DirectionSet& gamma = {}) const;
  [[nodiscard]] VolumeEstimate ball(double r) const { return annulus(0.0, r); }

  [[nodiscard]] bool exact() const { return exact_; }
  [[nodiscard]] double r_max() const { return r_max_; }
  [[nodiscard]] long sample_count() const { return static_cast<long>(t_.size()); }

 private:
  void build_exact();
  void refine_exact(double tau, const std::vector<Vec>& relevant);
  void build_monte_carlo_flat();
  void build_monte_carlo_curved();

  const FinslerStructure* s_;
  Vec p_;
  double r_max_;
  MeasureOptions opts_;
  bool exact_ = false;
  int n_dir_ = 0;
  int n_rad_ = 0;
  // Exact route: direction nodes with weight τ F^{−n} dσ and cut time.
  std::vector<Vec> node_dirs_;
  std::vector<double> node_weight_;
  std::vector<double> node_cut_;
  // Monte Carlo route: n_dir × n_rad samples (radius, weight), direction per row.
  std::vector<Vec> dirs_;
  std::vector<double> t_;
  std::vector<double> w_;
};

/// μ_F(B⁺(p, r)).
VolumeEstimate ball_volume(const FinslerStructure& s, const Vec& p, double r, const MeasureOptions& opts = {});

/// μ_F(A^Γ_{r,R}(p)).
VolumeEstimate annulus_volume(const FinslerStructure& s, const Vec& p, const DirectionSet& gamma, double r, double R,
                              const MeasureOptions& opts = {});

struct HypothesisReport {
  double min_ricci_margin = 0.0;  ///< min over samples of Ric(v)/F(v)² − (n−1)κ
  double max_s = 0.0;             ///< max |S(v)|/F(v)
  bool holds = false;
};

/// Sampled check of Ric ≥ (n−1)κ and ‖S‖ ≤ λ on the region described by spec.
HypothesisReport check_hypotheses(const FinslerStructure& s, const ComparisonParams& params, const SampleSpec& spec,
                                  double tol = 1e-6);

struct AnnulusPair {
  double r = 0.0;
  double R = 0.0;
  double s = 0.0;
  double S = 0.0;
  double ratio_inner = 0.0;  ///< vol(A_{r,R}) / V_{r,R}
  double ratio_outer = 0.0;  ///< vol(A_{s,S}) / V_{s,S}
  double excess = 0.0;       ///< ratio_outer − ratio_inner
  double se = 0.0;           ///< standard error of the excess (common random numbers)
  bool violation = false;    ///< excess > 3·se + numerical floor
};

struct VolumeComparisonReport {
  ComparisonParams params;
  HypothesisReport hypotheses;
  std::vector<double> radii;
  std::vector<AnnulusPair> pairs;
  int violations = 0;
  double max_excess_in_se = 0.0;  ///< max of excess/se over pairs with se > 0
  bool exact = false;
};

/// Checks vol(A_{s,S'})/V_{s,S'} ≤ vol(A_{r,R})/V_{r,R} for every grid
/// quadruple with r ≤ s ≤ S', r ≤ R ≤ S' and r < R, s < S'. Refuses to run
/// (HypothesisError) unless the sampled curvature hypotheses hold on `region`.
VolumeComparisonReport volume_comparison_check(const FinslerStructure& s, const Vec& p, const ComparisonParams& params,
                                               const std::vector<double>& radii, const SampleSpec& region,
                                               const MeasureOptions& opts = {});

struct VolumeReport {
  std::vector<double> radii;
  std::vector<double> volumes;
  std::vector<double> standard_errors;
  std::vector<double> comparison;  ///< V^{κ,λ}_{0,r}(S^{n−1})
  std::vector<double> ratios;
  double v_m = 0.0;
  double v_m_se = 0.0;
  int monotonicity_violations = 0;  ///< ratio increases beyond 3·SE
  bool exact = false;
};

/// Ratio curve vol(B(p, r)) / V^{κ,λ}_{0,r}(S^{n−1}); v_M is the mean ratio
/// over the last `window` grid points.
VolumeReport volume_growth_estimate(const FinslerStructure& s, const Vec& p, const ComparisonParams& params,
                                    const std::vector<double>& radii, int window = 3, const MeasureOptions& opts = {});

/// Direction set of sampled ray directions: a direction belongs to it when its
/// nearest sampled direction (by chart angle) is a ray. With delta > 0 the set
/// is widened to every direction within angle delta of a ray cell.
DirectionSet ray_direction_set(const RaySearch& rays, double delta = 0.0);

struct RayConeVolumes {
  VolumeEstimate ray;      ///< vol(B(Γ_ray, r))
  VolumeEstimate non_ray;  ///< vol(B(Γ_ray^c, r))
  VolumeEstimate tube;     ///< vol(B(T_δ(Γ_ray) ∖ Γ_ray, r))
  double comparison = 0.0;  ///< V^{0,λ}_{0,r}(S^{n−1})
  double ray_fraction = 0.0;
  double tube_ratio = 0.0;  ///< tube / comparison
  bool split_holds = false;  ///< ray ≥ v_M · comparison − 3·SE (v_M supplied)
};

/// Splits B(p, r) into the cone over ray directions and its complement (along
/// minimal segments) and measures the δ-tube around the ray set.
RayConeVolumes ray_cone_volume(const FinslerStructure& s, const Vec& p, const RaySearch& rays, double delta, double r,
                               double lambda, double v_m, const MeasureOptions& opts = {});

}  // namespace finsler
