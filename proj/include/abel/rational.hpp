#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace abel {

/// Arbitrary-precision rational. Always kept in canonical (reduced) form.
using Rational = mpq_class;

/// Raised when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot deliver the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n/d in canonical form; throws on a zero denominator.
inline Rational make_rational(long n, long d = 1) {
  if (d == 0) throw PreconditionError("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline int sign(const Rational& q) {
  const int s = sgn(q);
  return (s > 0) - (s < 0);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact binary value of a finite double.
inline Rational from_double(double v) {
  if (!std::isfinite(v)) throw PreconditionError("cannot convert non-finite value to a rational");
  return Rational(v);
}

/// Parses "p/q", an integer, or a decimal literal such as "0.125" or "-1e-3" into an exact rational.
/// Decimal literals are read as the decimal they spell, not the nearest double.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

}  // namespace abel
