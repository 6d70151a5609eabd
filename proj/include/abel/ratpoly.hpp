#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "abel/rational.hpp"

namespace abel {

/// Dense univariate polynomial with exact rational coefficients, constant term first.
///
/// Trailing zero coefficients are stripped on construction, so the leading
/// coefficient is nonzero unless the polynomial is identically zero. All
/// arithmetic is exact. A double copy of the coefficients is cached for fast
/// floating-point evaluation; it plays no role in any exact operation.
class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rational> coefficients);
  RatPoly(std::initializer_list<Rational> coefficients);

  static RatPoly constant(const Rational& c);
  static RatPoly monomial(const Rational& c, int power);
  /// (x - r)
  static RatPoly linear_factor(const Rational& r);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  /// Coefficient of x^k; zero beyond the degree.
  Rational coefficient(int k) const;
  Rational leading() const;

  Rational operator()(const Rational& x) const;
  double operator()(double x) const;
  /// Sign of p(x), exact.
  int sign_at(const Rational& x) const { return sign((*this)(x)); }

  RatPoly derivative() const;
  /// Antiderivative with zero constant term.
  RatPoly antiderivative() const;
  RatPoly monic() const;

  RatPoly operator-() const;
  friend RatPoly operator+(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator-(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const Rational& c, const RatPoly& p);
  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.coeffs_ == b.coeffs_; }

  RatPoly pow(unsigned k) const;

  struct DivMod;
  /// Euclidean division; throws PreconditionError when dividing by zero.
  DivMod divmod(const RatPoly& divisor) const;

  std::string to_string(const std::string& var = "x") const;

 private:
  void normalize();

  std::vector<Rational> coeffs_;
  std::vector<double> approx_;
};

struct RatPoly::DivMod {
  RatPoly quotient;
  RatPoly remainder;
};

RatPoly rem(const RatPoly& a, const RatPoly& b);
/// Monic greatest common divisor; gcd(0, 0) = 0.
RatPoly gcd(const RatPoly& a, const RatPoly& b);
/// p / gcd(p, p'): same distinct roots, all simple.
RatPoly squarefree_part(const RatPoly& p);

}  // namespace abel
