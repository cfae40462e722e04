#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

/// Type-erased Finsler norm F(x, y).
///
/// Every geometric quantity in the toolkit is a derivative of F of order at
/// most four, so the norm is evaluated on `double` and on nested duals up to
/// depth four. Implementations are normally generated by `make_norm` from a
/// generic callable.
class NormFunction {
 public:
  virtual ~NormFunction() = default;
  virtual double operator()(std::span<const double> x, std::span<const double> y) const = 0;
  virtual D1 operator()(std::span<const D1> x, std::span<const D1> y) const = 0;
  virtual D2 operator()(std::span<const D2> x, std::span<const D2> y) const = 0;
  virtual D3 operator()(std::span<const D3> x, std::span<const D3> y) const = 0;
  virtual D4 operator()(std::span<const D4> x, std::span<const D4> y) const = 0;
};

template <class Fn>
class NormAdapter final : public NormFunction {
 public:
  explicit NormAdapter(Fn fn) : fn_(std::move(fn)) {}
  double operator()(std::span<const double> x, std::span<const double> y) const override { return fn_(x, y); }
  D1 operator()(std::span<const D1> x, std::span<const D1> y) const override { return fn_(x, y); }
  D2 operator()(std::span<const D2> x, std::span<const D2> y) const override { return fn_(x, y); }
  D3 operator()(std::span<const D3> x, std::span<const D3> y) const override { return fn_(x, y); }
  D4 operator()(std::span<const D4> x, std::span<const D4> y) const override { return fn_(x, y); }

 private:
  Fn fn_;
};

/// Wrap a callable with a templated `operator()(std::span<const T>, std::span<const T>)`.
template <class Fn>
std::shared_ptr<const NormFunction> make_norm(Fn fn) {
  return std::make_shared<NormAdapter<Fn>>(std::move(fn));
}

/// Known qualitative properties of a structure, used for reporting and for
/// choosing exact evaluators. They are claims, checked by the test suite.
struct StructureTraits {
  bool translation_invariant = false;  ///< F does not depend on x (Minkowski norm on a chart or flat quotient)
  bool reversible = false;
  bool berwald = false;
  std::string curvature_sign;  ///< e.g. "K=0", "K=1", "K=-1/4"
  double scale = 1.0;          ///< characteristic length (circumference, radius)
};

/// A chart-based Finsler structure. Immutable after construction; safe to
/// share across threads.
class FinslerStructure {
 public:
  using DomainPredicate = std::function<bool(const Vec&)>;

  FinslerStructure(int dim, std::shared_ptr<const NormFunction> norm, DomainPredicate domain,
                   std::vector<Vec> lattice, std::string family_tag, StructureTraits traits = {});

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::vector<Vec>& lattice() const { return lattice_; }
  [[nodiscard]] const std::string& family_tag() const { return family_tag_; }
  [[nodiscard]] const StructureTraits& traits() const { return traits_; }
  [[nodiscard]] bool in_domain(const Vec& x) const { return domain_(x); }

  template <class T>
  T norm(const SmallVec<T>& x, const SmallVec<T>& y) const {
    return (*norm_)(x.span(), y.span());
  }

  /// Reduce a chart point modulo the deck lattice to the representative
  /// closest (in lattice coordinates) to `anchor`.
  [[nodiscard]] Vec reduce(const Vec& x, const Vec& anchor) const;

  /// All deck translations k·w with integer coefficients |k_i| <= bound.
  [[nodiscard]] std::vector<Vec> deck_translations(int bound) const;

 private:
  int dim_;
  std::shared_ptr<const NormFunction> norm_;
  DomainPredicate domain_;
  std::vector<Vec> lattice_;
  std::string family_tag_;
  StructureTraits traits_;
};

/// y ∈ T_xM.
struct TangentVector {
  Vec base;
  Vec fiber;
};

/// ω ∈ T*_xM.
struct Covector {
  Vec base;
  Vec components;
};

/// Flag at x with pole v and transverse direction w.
struct Flag {
  Vec at;
  Vec pole;
  Vec transverse;
};

/// Random base points and fiber directions used by sampled diagnostics.
struct SampleSpec {
  Vec center;
  double radius = 0.5;  ///< Euclidean chart radius around `center`
  int points = 20;
  int directions = 10;  ///< fiber directions per point
  std::uint64_t seed = 1;
};

/// Draw `spec.points` chart points inside the domain and the sampling ball.
std::vector<Vec> sample_points(const FinslerStructure& s, const SampleSpec& spec);

/// Uniform random unit (Euclidean) vectors in R^n.
std::vector<Vec> sample_directions(int n, int count, std::uint64_t seed);

}  // namespace finsler
