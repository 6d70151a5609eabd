#pragma once

#include <vector>

#include "abel/ratpoly.hpp"

namespace abel {

/// Signs of a sequence of values, with the number of strict sign changes
/// after deleting zeros.
struct SignSequence {
  std::vector<int> values;

  int variations() const;

  /// Signs of each polynomial of `polys` evaluated at x.
  static SignSequence at(const std::vector<RatPoly>& polys, const Rational& x);
};

/// Real interval with exact endpoints. Root-counting queries use the
/// half-open semantics (lo, hi].
struct Interval {
  Rational lo;
  Rational hi;
  bool lo_open = true;
  bool hi_open = false;

  Interval(Rational lo_, Rational hi_, bool lo_open_ = true, bool hi_open_ = false);

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const;
  double approx_midpoint() const { return to_double(midpoint()); }
};

/// S0 = p, S1 = q, S(k+1) = -rem(S(k-1), S(k)); stops before the first zero remainder.
std::vector<RatPoly> signed_remainder_sequence(const RatPoly& p, const RatPoly& q);

/// Sturm sequence of p: signed_remainder_sequence(p, p').
std::vector<RatPoly> sturm_sequence(const RatPoly& p);

/// Number of distinct real roots of p in (lo, hi]. Both endpoints must be
/// non-roots; an endpoint root raises PreconditionError.
int sturm_count(const RatPoly& p, const Interval& iv);

/// Budan-Fourier bound Var(Der(p), lo) - Var(Der(p), hi) on (lo, hi]: at
/// least the root count (with multiplicity) and of the same parity.
int budan_fourier_bound(const RatPoly& p, const Interval& iv);

/// The derivative list p, p', ..., p^(deg p).
std::vector<RatPoly> derivative_list(const RatPoly& p);

/// Determinant of the Sylvester matrix. Both polynomials must be nonzero.
Rational resultant(const RatPoly& p, const RatPoly& q);

/// (-1)^(n(n-1)/2) * Res(p, p') / lc(p); zero iff p has a repeated complex root.
Rational discriminant(const RatPoly& p);

/// Disjoint isolating intervals (lo, hi], sorted, one per distinct real root.
/// Endpoints are never roots. p is reduced to its squarefree part first.
std::vector<Interval> isolate_real_roots(const RatPoly& p);

/// Bisects an isolating interval of a squarefree p until its width is at most `width`.
Interval refine_root(const RatPoly& p, Interval iv, const Rational& width);

/// Exact sign of r at the unique root of the squarefree polynomial p inside iv.
int sign_at_root(const RatPoly& r, const RatPoly& p, const Interval& iv);

/// Cauchy bound: every complex root has modulus strictly below the returned value.
Rational root_bound(const RatPoly& p);

}  // namespace abel
