#pragma once

#include <stdexcept>
#include <string>

namespace dpk {

// Caller supplied arguments outside an operation's mathematical domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed or inconsistent arguments (sizes, orderings, coverage).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A result would overflow double precision.
struct RangeError : std::range_error {
  using std::range_error::range_error;
};

// Request exceeds the sizes an operation supports (e.g. quadrature over W_N with N > 3).
struct UnsupportedSizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Division by a vanishing quantity.
struct DivisionError : std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical procedure could not certify the requested accuracy.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Results that violate a structural guarantee (a correlation determinant that is
// clearly negative, a branch called with the wrong time ordering).
struct NumericalConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dpk
