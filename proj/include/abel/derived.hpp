#pragma once

#include <optional>

#include "abel/family.hpp"

namespace abel {

// Pointwise certificate functions. Each is templated on the scalar so the same
// expression serves floating-point sampling and exact rational evaluation.

/// A'B - AB'.
template <class S>
S cross_term(const Jet<S>& j) {
  return j.dA * j.B - j.A * j.dB;
}

/// P = 4(B A' - B' A) - B^3.
template <class S>
S certificate_P(const Jet<S>& j) {
  return 4 * cross_term(j) - j.B * j.B * j.B;
}

template <class S>
S certificate_P_dot(const Jet<S>& j) {
  return 4 * (j.B * j.ddA - j.ddB * j.A) - 3 * j.B * j.B * j.dB;
}

/// v(t, x) = B (2 A x + B)^2 + P = 4A^2B x^2 + 4AB^2 x + 4(A'B - AB').
template <class S>
S certificate_v(const Jet<S>& j, const S& x) {
  const S w = 2 * j.A * x + j.B;
  return j.B * w * w + certificate_P(j);
}

/// Derivative of v along the Abel vector field: v_t + v_x (A x^3 + B x^2).
template <class S>
S certificate_v_dot(const Jet<S>& j, const S& x) {
  const S w = 2 * j.A * x + j.B;
  const S w_t = 2 * j.dA * x + j.dB;
  const S v_t = j.dB * w * w + 2 * j.B * w * w_t + certificate_P_dot(j);
  const S v_x = 4 * j.A * j.B * w;
  return v_t + v_x * (j.A * x * x * x + j.B * x * x);
}

/// Q = B (A B'' - B A'') + 3 B' (B A' - A B').
template <class S>
S certificate_Q(const Jet<S>& j) {
  return j.B * (j.A * j.ddB - j.B * j.ddA) + 3 * j.dB * cross_term(j);
}

/// The zero-crossing curve of 2 A x + B; empty at zeros of A (a pole).
inline std::optional<double> phi_value(const Jet<double>& j) {
  if (j.A == 0.0) return std::nullopt;
  return -j.B / (2.0 * j.A);
}

/// Callable bundle of the certificate functions of one family.
class DerivedFunctions {
 public:
  explicit DerivedFunctions(CoefficientFamily fam) : fam_(std::move(fam)) {}

  const CoefficientFamily& family() const { return fam_; }
  double P(double t) const { return certificate_P(fam_.jet(t)); }
  double v(double t, double x) const { return certificate_v(fam_.jet(t), x); }
  double vdot(double t, double x) const { return certificate_v_dot(fam_.jet(t), x); }
  double Q(double t) const { return certificate_Q(fam_.jet(t)); }
  double cross(double t) const { return cross_term(fam_.jet(t)); }
  /// -B/(2A); empty at a pole (zero of A).
  std::optional<double> phi(double t) const { return phi_value(fam_.jet(t)); }

 private:
  CoefficientFamily fam_;
};

inline DerivedFunctions derived_functions(const CoefficientFamily& fam) { return DerivedFunctions(fam); }

/// Exact polynomial forms of the certificate functions of a QuadPoly family.
struct QuadPolyForms {
  RatPoly A, B;
  RatPoly cross;  ///< A'B - AB' (degree 2)
  RatPoly P;      ///< degree 6
  RatPoly Q;      ///< degree 3
};

QuadPolyForms quad_poly_forms(const QuadPoly& q);

}  // namespace abel
