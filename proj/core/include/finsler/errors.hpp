#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point left the chart domain, or a lattice quotient was used outside its
/// fundamental domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The zero vector was used where a nonzero one is required, a tensor is
/// singular, or a flag spans no plane.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (optimizer, shooting, root finder, quadrature) failed
/// to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A limit quotient did not settle, e.g. because the base point sits on a
/// cut locus where the distance function is not differentiable.
class NonSmoothError : public Error {
 public:
  using Error::Error;
};

/// The geometric hypotheses of a comparison check are not met.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
