#include "finsler/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finsler/curvature.hpp"
#include "finsler/detail/derivatives.hpp"
#include "finsler/detail/flat.hpp"
#include "finsler/errors.hpp"
#include "finsler/parallel.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ipow(double x, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= x;
  return out;
}

std::mt19937_64 stratum_rng(std::uint64_t seed, std::uint64_t stratum) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stratum), static_cast<std::uint32_t>(stratum >> 32)};
  return std::mt19937_64(seq);
}

/// ∫_r^R e^{λt} t^m dt by repeated integration by parts.
double exp_power_integral(double lambda, int m, double r, double R) {
  auto antiderivative = [&](double t) {
    double sum = 0.0;
    double coef = 1.0 / lambda;  // m!/(m−k)! / λ^{k+1} with alternating sign
    for (int k = 0; k <= m; ++k) {
      sum += ((k % 2) ? -coef : coef) * ipow(t, m - k);
      coef *= static_cast<double>(m - k) / lambda;
    }
    return std::exp(lambda * t) * sum;
  };
  return antiderivative(R) - antiderivative(r);
}

bool is_translation_invariant(const FinslerStructure& s) { return s.traits().translation_invariant; }

double unit_sphere_measure(int n) { return unit_sphere_area(n); }

}  // namespace

double s_kappa(double kappa, double t) {
  if (t < 0.0) throw DomainError("s_kappa: t must be non-negative");
  if (kappa > 0.0) return std::sin(std::sqrt(kappa) * t);
  if (kappa < 0.0) return std::sinh(std::sqrt(-kappa) * t);
  return t;
}

double comparison_volume(const ComparisonParams& params, double r, double R, double sigma_measure) {
  if (!(r >= 0.0 && r <= R)) throw DomainError("comparison_volume: need 0 <= r <= R");
  if (!(sigma_measure > 0.0)) throw DomainError("comparison_volume: sigma measure must be positive");
  if (params.lambda < 0.0) throw DomainError("comparison_volume: lambda must be non-negative");
  const int n = params.n;
  if (n < 2) throw DomainError("comparison_volume: dimension must be at least 2");
  if (r == R) return 0.0;
  const double lambda = params.lambda;
  if (params.kappa == 0.0) {
    if (lambda == 0.0) return sigma_measure * (ipow(R, n) - ipow(r, n)) / n;
    if (lambda * R >= 1.0) return sigma_measure * exp_power_integral(lambda, n - 1, r, R);
  }
  auto integrand = [&](double t) { return std::exp(lambda * t) * ipow(s_kappa(params.kappa, t), n - 1); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, r, R, 15, 1e-14, &err);
  return sigma_measure * value;
}

PolarVolume::PolarVolume(const FinslerStructure& s, Vec p, double r_max, const MeasureOptions& opts)
    : s_(&s), p_(std::move(p)), r_max_(r_max), opts_(opts) {
  if (p_.size() != s.dim()) throw DomainError("polar volume: base point has the wrong dimension");
  if (!s.in_domain(p_)) throw DomainError("polar volume: base point outside the chart domain");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("polar volume: r_max must be positive and finite");
  const bool flat = is_translation_invariant(s);
  using Method = MeasureOptions::Method;
  if (opts.method == Method::kExact && !flat)
    throw DomainError("polar volume: the exact evaluator needs a translation-invariant structure");
  exact_ = flat && opts.method != Method::kMonteCarlo;
  if (exact_) {
    build_exact();
    return;
  }
  if (opts.samples < 4) throw DomainError("polar volume: need at least 4 samples");
  if (flat)
    build_monte_carlo_flat();
  else
    build_monte_carlo_curved();
}

void PolarVolume::build_exact() {
  const FinslerStructure& s = *s_;
  const int n = s.dim();
  if (n == 2) {
    const int count = 1 << 14;
    const double dphi = kTwoPi / count;
    for (int j = 0; j < count; ++j) {
      const double phi = (j + 0.5) * dphi;
      node_dirs_.push_back(Vec{std::cos(phi), std::sin(phi)});
      node_weight_.push_back(dphi);
    }
  } else if (n == 3) {
    const int nz = 256;
    const int nphi = 512;
    const double dz = 2.0 / nz;
    const double dphi = kTwoPi / nphi;
    for (int a = 0; a < nz; ++a) {
      const double z = -1.0 + (a + 0.5) * dz;
      const double rho = std::sqrt(1.0 - z * z);
      for (int b = 0; b < nphi; ++b) {
        const double phi = (b + 0.5) * dphi;
        node_dirs_.push_back(Vec{rho * std::cos(phi), rho * std::sin(phi), z});
        node_weight_.push_back(dz * dphi);
      }
    }
  } else {
    const SphereRule& rule = sphere_rule(n);
    node_dirs_ = rule.nodes;
    node_weight_ = rule.weights;
  }
  const double tau = bh_density(s, p_);
  const auto relevant = detail::relevant_translations(s);
  node_cut_.assign(node_dirs_.size(), 0.0);
  parallel_for(static_cast<int>(node_dirs_.size()), [&](int j) {
    const double f = s.norm(p_, node_dirs_[j]);
    node_weight_[j] *= tau / ipow(f, n);
    node_dirs_[j] = node_dirs_[j] / f;
    node_cut_[j] = detail::flat_cut_time(s, node_dirs_[j], relevant);
  });
  if (n == 2) refine_exact(tau, relevant);
}

void PolarVolume::refine_exact(double tau, const std::vector<Vec>& relevant) {
  // Near the cut locus of a quotient the cut time behaves like 1/angle, which
  // the midpoint rule resolves poorly. Cells whose cut time (below r_max)
  // varies by v relative to its size are split into ~v/1e-4 sub-cells.
  const size_t count = node_dirs_.size();
  const double dphi = kTwoPi / static_cast<double>(count);
  std::vector<int> split(count, 1);
  for (size_t j = 0; j < count; ++j) {
    const double cm = node_cut_[(j + count - 1) % count];
    const double c = node_cut_[j];
    const double cp = node_cut_[(j + 1) % count];
    const double lo = std::min({cm, c, cp});
    const double hi = std::max({cm, c, cp});
    if (!(lo < r_max_) || !std::isfinite(lo)) continue;
    const double v = std::isfinite(hi) ? (hi - lo) / lo : 1.0;
    split[j] = static_cast<int>(std::clamp(std::ceil(v / 1e-4), 1.0, 256.0));
  }
  std::vector<Vec> dirs;
  std::vector<double> weight;
  std::vector<double> cut;
  std::vector<size_t> pending;  // sub-nodes still missing their cut time
  for (size_t j = 0; j < count; ++j) {
    if (split[j] == 1) {
      dirs.push_back(node_dirs_[j]);
      weight.push_back(node_weight_[j]);
      cut.push_back(node_cut_[j]);
      continue;
    }
    const double h = dphi / split[j];
    for (int k = 0; k < split[j]; ++k) {
      const double phi = static_cast<double>(j) * dphi + (k + 0.5) * h;
      const Vec d{std::cos(phi), std::sin(phi)};
      const double f = s_->norm(p_, d);
      pending.push_back(dirs.size());
      dirs.push_back(d / f);
      weight.push_back(h * tau / (f * f));
      cut.push_back(0.0);
    }
  }
  parallel_for(static_cast<int>(pending.size()), [&](int i) {
    const size_t k = pending[i];
    cut[k] = detail::flat_cut_time(*s_, dirs[k], relevant);
  });
  node_dirs_ = std::move(dirs);
  node_weight_ = std::move(weight);
  node_cut_ = std::move(cut);
}

namespace {

/// Stratified unit directions: equal-angle cells for n = 2, equal-area
/// (height × azimuth) cells for n = 3, independent uniform draws above.
/// Returns the Euclidean unit vector and the cell's sphere measure.
struct DirectionStrata {
  int n;
  int count;
  int nz = 1;
  int nphi = 1;

  DirectionStrata(int dim, int requested) : n(dim), count(requested) {
    if (n == 3) {
      nz = std::max(1, static_cast<int>(std::lround(std::sqrt(requested / 2.0))));
      nphi = std::max(2, requested / nz);
      nphi += nphi % 2;
      count = nz * nphi;
    }
  }

  [[nodiscard]] double cell_measure() const { return unit_sphere_area(n) / count; }

  Vec draw(int i, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (n == 2) {
      const double phi = (i + unif(rng)) * kTwoPi / count;
      return Vec{std::cos(phi), std::sin(phi)};
    }
    if (n == 3) {
      const int a = i / nphi;
      const int b = i % nphi;
      const double z = -1.0 + (a + unif(rng)) * 2.0 / nz;
      const double phi = (b + unif(rng)) * kTwoPi / nphi;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      return Vec{rho * std::cos(phi), rho * std::sin(phi), z};
    }
    std::normal_distribution<double> gauss;
    Vec u(n);
    for (int k = 0; k < n; ++k) u[k] = gauss(rng);
    return u / euclidean_norm(u);
  }
};

void split_samples(long samples, int& n_dir, int& n_rad) {
  n_dir = std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples)))));
  n_dir += n_dir % 2;
  n_rad = std::max(1, static_cast<int>(samples / n_dir));
}

}  // namespace

void PolarVolume::build_monte_carlo_flat() {
  const FinslerStructure& s = *s_;
  const int n = s.dim();
  split_samples(opts_.samples, n_dir_, n_rad_);
  DirectionStrata strata(n, n_dir_);
  n_dir_ = strata.count;
  const double tau = bh_density(s, p_);
  const auto relevant = detail::relevant_translations(s);
  const double dt = r_max_ / n_rad_;
  dirs_.assign(n_dir_, Vec());
  t_.assign(static_cast<size_t>(n_dir_) * n_rad_, 0.0);
  w_.assign(t_.size(), 0.0);
  parallel_for(n_dir_, [&](int i) {
    auto rng = stratum_rng(opts_.seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Vec u = strata.draw(i, rng);
    const double f = s.norm(p_, u);
    const Vec theta = u / f;
    const double cut = detail::flat_cut_time(s, theta, relevant);
    dirs_[i] = theta;
    const double scale = tau / ipow(f, n) * strata.cell_measure() * dt;
    for (int j = 0; j < n_rad_; ++j) {
      const double t = (j + unif(rng)) * dt;
      const size_t k = static_cast<size_t>(i) * n_rad_ + j;
      t_[k] = t;
      w_[k] = t <= cut ? scale * ipow(t, n - 1) : 0.0;
    }
  });
}

void PolarVolume::build_monte_carlo_curved() {
  const FinslerStructure& s = *s_;
  if (s.dim() != 2) throw DomainError("polar volume: curved structures are supported in the plane only");
  split_samples(opts_.samples, n_dir_, n_rad_);
  const double dt = r_max_ / n_rad_;
  const double dphi = kTwoPi / n_dir_;
  const double h_max = opts_.step > 0.0 ? opts_.step : r_max_ / 400.0;
  dirs_.assign(n_dir_, Vec());
  t_.assign(static_cast<size_t>(n_dir_) * n_rad_, 0.0);
  w_.assign(t_.size(), 0.0);

  using DVec = SmallVec<D1>;
  auto accel = [&](const DVec& x, const DVec& v) {
    if (!s.in_domain(detail::re_part(x))) throw DomainError("polar volume: chart coverage exceeded");
    DVec g = detail::spray(s, x, v);
    for (int k = 0; k < 2; ++k) g[k] = -2.0 * g[k];
    return g;
  };

  parallel_for(n_dir_, [&](int i) {
    auto rng = stratum_rng(opts_.seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double phi = (i + unif(rng)) * dphi;
    // Direction and its φ-derivative ride along as a dual number.
    DVec u(2);
    u[0] = D1(std::cos(phi), -std::sin(phi));
    u[1] = D1(std::sin(phi), std::cos(phi));
    const D1 f = s.norm(detail::constant(p_), u);
    DVec x = detail::constant(p_);
    DVec v(2);
    for (int k = 0; k < 2; ++k) v[k] = u[k] / f;
    dirs_[i] = detail::re_part(v);

    double t = 0.0;
    bool alive = true;
    auto step = [&](double h) {
      const DVec a1 = accel(x, v);
      const DVec x2 = x + (0.5 * h) * v;
      const DVec v2 = v + (0.5 * h) * a1;
      const DVec a2 = accel(x2, v2);
      const DVec x3 = x + (0.5 * h) * v2;
      const DVec v3 = v + (0.5 * h) * a2;
      const DVec a3 = accel(x3, v3);
      const DVec x4 = x + h * v3;
      const DVec v4 = v + h * a3;
      const DVec a4 = accel(x4, v4);
      x = x + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
      v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      t += h;
    };
    // det[∂_t x, ∂_φ x]; positive until the first conjugate point.
    auto jacobian = [&] { return v[0].re * x[1].eps - v[1].re * x[0].eps; };
    for (int j = 0; j < n_rad_ && alive; ++j) {
      const double target = (j + unif(rng)) * dt;
      const size_t k = static_cast<size_t>(i) * n_rad_ + j;
      t_[k] = target;
      while (t < target) {
        step(std::min(h_max, target - t));
        if (jacobian() <= 0.0) {
          alive = false;
          break;
        }
      }
      if (!alive) break;
      const Vec xr = detail::re_part(x);
      if (!s.in_domain(xr)) throw DomainError("polar volume: chart coverage exceeded");
      w_[k] = jacobian() * bh_density(s, xr) * dphi * dt;
    }
    for (int j = 0; j < n_rad_; ++j) {
      const size_t k = static_cast<size_t>(i) * n_rad_ + j;
      if (t_[k] == 0.0) t_[k] = (j + 0.5) * dt;
    }
  });
}

VolumeEstimate PolarVolume::combination(const std::vector<Term>& terms) const {
  const int n = s_->dim();
  for (const Term& term : terms) {
    if (!(term.r >= 0.0 && term.r <= term.R)) throw DomainError("polar volume: need 0 <= r <= R");
    if (term.R > r_max_ * (1.0 + 1e-12)) throw DomainError("polar volume: radius beyond the sampled range");
  }
  VolumeEstimate out;
  if (exact_) {
    out.exact = true;
    double acc = 0.0;
    for (const Term& term : terms) {
      double sum = 0.0;
      for (size_t j = 0; j < node_dirs_.size(); ++j) {
        const double c = node_cut_[j];
        if (term.gamma && !term.gamma(node_dirs_[j])) continue;
        sum += node_weight_[j] * (ipow(std::min(term.R, c), n) - ipow(std::min(term.r, c), n)) / n;
      }
      acc += term.coef * sum;
    }
    out.value = acc;
    return out;
  }
  std::vector<double> totals(n_dir_, 0.0);
  for (const Term& term : terms) {
    for (int i = 0; i < n_dir_; ++i) {
      if (term.gamma && !term.gamma(dirs_[i])) continue;
      double sum = 0.0;
      for (int j = 0; j < n_rad_; ++j) {
        const size_t k = static_cast<size_t>(i) * n_rad_ + j;
        if (t_[k] >= term.r && t_[k] <= term.R) sum += w_[k];
      }
      totals[i] += term.coef * sum;
    }
  }
  double value = 0.0;
  double var = 0.0;
  for (int i = 0; i < n_dir_; i += 2) {
    value += totals[i] + totals[i + 1];
    const double d = totals[i] - totals[i + 1];
    var += d * d;
  }
  out.value = value;
  out.se = std::sqrt(var);
  return out;
}

VolumeEstimate PolarVolume::annulus(double r, double R, const DirectionSet& gamma) const {
  return combination({Term{r, R, 1.0, gamma}});
}

VolumeEstimate ball_volume(const FinslerStructure& s, const Vec& p, double r, const MeasureOptions& opts) {
  if (r < 0.0) throw DomainError("ball_volume: radius must be non-negative");
  if (r == 0.0) return {0.0, 0.0, true};
  return PolarVolume(s, p, r, opts).ball(r);
}

VolumeEstimate annulus_volume(const FinslerStructure& s, const Vec& p, const DirectionSet& gamma, double r, double R,
                              const MeasureOptions& opts) {
  if (!(r >= 0.0 && r <= R)) throw DomainError("annulus_volume: need 0 <= r <= R");
  if (R == 0.0) return {0.0, 0.0, true};
  return PolarVolume(s, p, R, opts).annulus(r, R, gamma);
}

HypothesisReport check_hypotheses(const FinslerStructure& s, const ComparisonParams& params, const SampleSpec& spec,
                                  double tol) {
  const int n = s.dim();
  HypothesisReport rep;
  rep.min_ricci_margin = std::numeric_limits<double>::infinity();
  const auto points = sample_points(s, spec);
  const auto dirs = sample_directions(n, spec.directions, spec.seed + 3);
  for (const Vec& x : points) {
    for (const Vec& v : dirs) {
      const double f = s.norm(x, v);
      const double ric = ricci_curvature(s, {x, v}) / (f * f);
      rep.min_ricci_margin = std::min(rep.min_ricci_margin, ric - (n - 1) * params.kappa);
      rep.max_s = std::max(rep.max_s, std::abs(s_curvature(s, {x, v})) / f);
    }
  }
  rep.holds = rep.min_ricci_margin >= -tol && rep.max_s <= params.lambda + tol;
  return rep;
}

VolumeComparisonReport volume_comparison_check(const FinslerStructure& s, const Vec& p, const ComparisonParams& params,
                                               const std::vector<double>& radii, const SampleSpec& region,
                                               const MeasureOptions& opts) {
  if (params.n != s.dim()) throw DomainError("volume_comparison_check: params.n differs from the dimension");
  if (radii.size() < 2) throw DomainError("volume_comparison_check: need at least two radii");
  VolumeComparisonReport rep;
  rep.params = params;
  rep.hypotheses = check_hypotheses(s, params, region);
  if (!rep.hypotheses.holds) {
    throw HypothesisError("volume_comparison_check: sampled curvature hypotheses fail (min Ric margin " +
                          std::to_string(rep.hypotheses.min_ricci_margin) + ", max |S| " +
                          std::to_string(rep.hypotheses.max_s) + ")");
  }
  rep.radii = radii;
  std::sort(rep.radii.begin(), rep.radii.end());
  if (rep.radii.front() < 0.0) throw DomainError("volume_comparison_check: radii must be non-negative");
  const PolarVolume polar(s, p, rep.radii.back(), opts);
  rep.exact = polar.exact();
  const double sigma = unit_sphere_measure(s.dim());
  const auto& g = rep.radii;
  const size_t m = g.size();
  rep.max_excess_in_se = 0.0;
  for (size_t a = 0; a < m; ++a)            // r
    for (size_t b = a + 1; b < m; ++b)      // R
      for (size_t c = a; c < m; ++c)        // s
        for (size_t d = std::max(b, c + 1); d < m; ++d) {  // S'
          if (a == c && b == d) continue;
          AnnulusPair pr{g[a], g[b], g[c], g[d]};
          const double v_in = comparison_volume(params, pr.r, pr.R, sigma);
          const double v_out = comparison_volume(params, pr.s, pr.S, sigma);
          const VolumeEstimate in = polar.annulus(pr.r, pr.R);
          const VolumeEstimate out = polar.annulus(pr.s, pr.S);
          pr.ratio_inner = in.value / v_in;
          pr.ratio_outer = out.value / v_out;
          const VolumeEstimate diff =
              polar.combination({{pr.s, pr.S, 1.0 / v_out, {}}, {pr.r, pr.R, -1.0 / v_in, {}}});
          pr.excess = diff.value;
          pr.se = diff.se;
          const double floor = 1e-9 * std::max(std::abs(pr.ratio_inner), std::abs(pr.ratio_outer));
          pr.violation = pr.excess > 3.0 * pr.se + floor;
          if (pr.se > 0.0) rep.max_excess_in_se = std::max(rep.max_excess_in_se, pr.excess / pr.se);
          rep.violations += pr.violation ? 1 : 0;
          rep.pairs.push_back(pr);
        }
  return rep;
}

VolumeReport volume_growth_estimate(const FinslerStructure& s, const Vec& p, const ComparisonParams& params,
                                    const std::vector<double>& radii, int window, const MeasureOptions& opts) {
  if (radii.empty()) throw DomainError("volume_growth_estimate: empty radius grid");
  if (window < 1) throw DomainError("volume_growth_estimate: window must be positive");
  if (params.n != s.dim()) throw DomainError("volume_growth_estimate: params.n differs from the dimension");
  VolumeReport rep;
  rep.radii = radii;
  std::sort(rep.radii.begin(), rep.radii.end());
  if (!(rep.radii.front() > 0.0)) throw DomainError("volume_growth_estimate: radii must be positive");
  const PolarVolume polar(s, p, rep.radii.back(), opts);
  rep.exact = polar.exact();
  const double sigma = unit_sphere_measure(s.dim());
  for (double r : rep.radii) {
    const VolumeEstimate v = polar.ball(r);
    const double cmp = comparison_volume(params, 0.0, r, sigma);
    rep.volumes.push_back(v.value);
    rep.standard_errors.push_back(v.se);
    rep.comparison.push_back(cmp);
    rep.ratios.push_back(v.value / cmp);
  }
  for (size_t k = 1; k < rep.radii.size(); ++k) {
    const VolumeEstimate diff = polar.combination(
        {{0.0, rep.radii[k], 1.0 / rep.comparison[k], {}}, {0.0, rep.radii[k - 1], -1.0 / rep.comparison[k - 1], {}}});
    const double floor = 1e-9 * rep.ratios[k - 1];
    if (diff.value > 3.0 * diff.se + floor) ++rep.monotonicity_violations;
  }
  const size_t w = std::min(rep.radii.size(), static_cast<size_t>(window));
  for (size_t k = rep.radii.size() - w; k < rep.radii.size(); ++k) {
    rep.v_m += rep.ratios[k] / static_cast<double>(w);
    rep.v_m_se += rep.standard_errors[k] / rep.comparison[k] / static_cast<double>(w);
  }
  return rep;
}

DirectionSet ray_direction_set(const RaySearch& rays, double delta) {
  std::vector<Vec> unit;
  for (const Vec& d : rays.directions) unit.push_back(d / euclidean_norm(d));
  std::vector<char> flags = rays.is_ray;
  return [unit = std::move(unit), flags = std::move(flags), delta](const Vec& y) {
    const Vec u = y / euclidean_norm(y);
    size_t nearest = 0;
    double best = -2.0;
    bool near_ray = false;
    const double cos_delta = std::cos(delta);
    for (size_t k = 0; k < unit.size(); ++k) {
      const double c = dot(u, unit[k]);
      if (c > best) {
        best = c;
        nearest = k;
      }
      if (delta > 0.0 && flags[k] && c >= cos_delta) near_ray = true;
    }
    return (!unit.empty() && flags[nearest]) || near_ray;
  };
}

RayConeVolumes ray_cone_volume(const FinslerStructure& s, const Vec& p, const RaySearch& rays, double delta, double r,
                               double lambda, double v_m, const MeasureOptions& opts) {
  if (!(r > 0.0)) throw DomainError("ray_cone_volume: radius must be positive");
  if (delta < 0.0) throw DomainError("ray_cone_volume: delta must be non-negative");
  RayConeVolumes out;
  const PolarVolume polar(s, p, r, opts);
  const DirectionSet in_rays = ray_direction_set(rays);
  const DirectionSet in_tube = ray_direction_set(rays, delta);
  const DirectionSet not_rays = [&](const Vec& y) { return !in_rays(y); };
  const DirectionSet tube_only = [&](const Vec& y) { return in_tube(y) && !in_rays(y); };
  out.ray = polar.annulus(0.0, r, in_rays);
  out.non_ray = polar.annulus(0.0, r, not_rays);
  out.tube = polar.annulus(0.0, r, tube_only);
  out.comparison = comparison_volume({0.0, lambda, s.dim()}, 0.0, r, unit_sphere_measure(s.dim()));
  out.ray_fraction = rays.fraction;
  out.tube_ratio = out.tube.value / out.comparison;
  const double floor = 1e-9 * out.comparison;
  out.split_holds = out.ray.value >= v_m * out.comparison - 3.0 * out.ray.se - floor;
  return out;
}

}  // namespace finsler
