#include "finsler/structure.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "finsler/errors.hpp"

namespace finsler {

FinslerStructure::FinslerStructure(int dim, std::shared_ptr<const NormFunction> norm, DomainPredicate domain,
                                   std::vector<Vec> lattice, std::string family_tag, StructureTraits traits)
    : dim_(dim),
      norm_(std::move(norm)),
      domain_(std::move(domain)),
      lattice_(std::move(lattice)),
      family_tag_(std::move(family_tag)),
      traits_(std::move(traits)) {
  if (dim_ < 2 || dim_ > kMaxDim) throw DomainError("FinslerStructure: dimension must be in [2, 4]");
  if (!norm_) throw DomainError("FinslerStructure: missing norm evaluator");
  if (!domain_) domain_ = [](const Vec&) { return true; };
  for (const auto& w : lattice_)
    if (w.size() != dim_) throw DomainError("FinslerStructure: lattice vector has wrong dimension");
}

Vec FinslerStructure::reduce(const Vec& x, const Vec& anchor) const {
  if (lattice_.empty()) return x;
  const int m = static_cast<int>(lattice_.size());
  Eigen::MatrixXd w(dim_, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < dim_; ++i) w(i, j) = lattice_[j][i];
  Eigen::VectorXd d(dim_);
  for (int i = 0; i < dim_; ++i) d(i) = x[i] - anchor[i];
  const Eigen::VectorXd c = w.colPivHouseholderQr().solve(d);
  Vec out = x;
  for (int j = 0; j < m; ++j) {
    const double k = std::round(c(j));
    for (int i = 0; i < dim_; ++i) out[i] -= k * lattice_[j][i];
  }
  return out;
}

std::vector<Vec> FinslerStructure::deck_translations(int bound) const {
  std::vector<Vec> out;
  const int m = static_cast<int>(lattice_.size());
  if (m == 0) {
    out.emplace_back(dim_);
    return out;
  }
  std::vector<int> k(m, -bound);
  while (true) {
    Vec t(dim_);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < dim_; ++i) t[i] += k[j] * lattice_[j][i];
    out.push_back(t);
    int j = 0;
    while (j < m && ++k[j] > bound) k[j++] = -bound;
    if (j == m) break;
  }
  return out;
}

std::vector<Vec> sample_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    const double len = euclidean_norm(v);
    if (len < 1e-8) continue;
    out.push_back(v / len);
  }
  return out;
}

std::vector<Vec> sample_points(const FinslerStructure& s, const SampleSpec& spec) {
  const int n = s.dim();
  Vec center = spec.center.size() == n ? spec.center : Vec(n);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Vec> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < spec.points) {
    if (++attempts > 1000 * (spec.points + 10))
      throw DomainError("sample_points: sampling ball does not meet the chart domain");
    Vec x(n);
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = unif(rng);
      r2 += x[i] * x[i];
    }
    if (r2 > 1.0) continue;
    x = center + spec.radius * x;
    if (!s.in_domain(x)) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace finsler
