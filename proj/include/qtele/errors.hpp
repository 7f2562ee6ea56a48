#ifndef QTELE_ERRORS_HPP
#define QTELE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtele {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant (parameters, angles, grids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on a position pair whose joint density is effectively zero.
class NegligibleDensity : public Error {
 public:
  using Error::Error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

/// The two branches overlap completely at the given positions, so a position
/// measurement carries no which-path information.
class NotDistinguishable : public Error {
 public:
  using Error::Error;
};

/// Probability mass reached the edge of a propagation grid.
class GridTooSmall : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qtele

#endif  // QTELE_ERRORS_HPP
