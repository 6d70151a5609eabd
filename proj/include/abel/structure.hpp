#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abel/family.hpp"

namespace abel {

struct ZeroInfo {
  double location;
  bool simple;
};

/// Zeros of A and B on the period and the interleaving pattern required by (C1):
/// A(0) = 0, one simple interior zero t_A of A, and simple zeros of B with
/// 0 < t_B1 < t_A < t_B2 <= T.
struct ZeroStructure {
  std::vector<ZeroInfo> zeros_A;
  std::vector<ZeroInfo> zeros_B;
  bool interleaved = false;
  std::optional<double> t_A, t_B1, t_B2;
  /// Exact values for QuadPoly families.
  std::optional<Rational> exact_t_A, exact_t_B1, exact_t_B2;
  /// sgn(A'(0) B(0)); the sign the semistability conclusion predicts for u_xx.
  int orientation = 0;
  std::string diagnostic;
};

ZeroStructure check_C1(const CoefficientFamily& fam);

enum class Uniqueness { AtMostOneBySign, AtMostOneByCombination, Inconclusive };

struct UniquenessPrecheck {
  Uniqueness verdict = Uniqueness::Inconclusive;
  /// QuadPoly: discriminant of d(alpha) = Disc_t(alpha A + B). LinTrig: the product
  /// 16 a^2 b^2 (zA1 - zB1)(zA2 - zB1)(zA1 - zB2)(zA2 - zB2) in half-angle coordinates.
  std::optional<double> combination_discriminant;
  std::optional<Rational> exact_combination_discriminant;
  std::string reason;
};

UniquenessPrecheck uniqueness_precheck(const CoefficientFamily& fam);

/// d(alpha) = Disc_t(alpha A + B) as an exact quadratic in alpha.
RatPoly combination_discriminant_poly(const QuadPoly& q);

const char* to_string(Uniqueness u);

}  // namespace abel
