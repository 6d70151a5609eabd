#pragma once

#include <numbers>
#include <string>
#include <variant>

#include "abel/ratpoly.hpp"

namespace abel {

/// Values of the coefficient functions and their first two derivatives at one time.
template <class Scalar>
struct Jet {
  Scalar A, dA, ddA;
  Scalar B, dB, ddB;
};

/// A(t) = t(t - t_A), B(t) = (t - t_B)(t - 1) on [0, 1].
class QuadPoly {
 public:
  QuadPoly(Rational t_A, Rational t_B);

  const Rational& t_A() const { return ta_; }
  const Rational& t_B() const { return tb_; }
  static constexpr double period() { return 1.0; }

  template <class Scalar>
  Jet<Scalar> jet(const Scalar& t, const Scalar& ta, const Scalar& tb) const {
    Jet<Scalar> j;
    j.A = t * (t - ta);
    j.dA = 2 * t - ta;
    j.ddA = Scalar(2);
    j.B = (t - tb) * (t - 1);
    j.dB = 2 * t - (tb + 1);
    j.ddB = Scalar(2);
    return j;
  }
  Jet<double> jet(double t) const { return jet<double>(t, ta_d_, tb_d_); }
  Jet<Rational> jet(const Rational& t) const { return jet<Rational>(t, ta_, tb_); }

  RatPoly A_poly() const;
  RatPoly B_poly() const;

 private:
  Rational ta_, tb_;
  double ta_d_, tb_d_;
};

/// Canonical linear-trigonometric pair on [0, 2*pi]:
/// A(t) = a0 - sin t - a0 cos t, B(t) = b0 + b1 sin t + b2 cos t, with b0 + b2 > 0.
class LinTrig {
 public:
  /// Throws PreconditionError unless b0 + b2 > 0.
  LinTrig(double a0, double b0, double b1, double b2);

  double a0() const { return a0_; }
  double b0() const { return b0_; }
  double b1() const { return b1_; }
  double b2() const { return b2_; }
  static constexpr double period() { return 2.0 * std::numbers::pi; }

  Jet<double> jet(double t) const;

 private:
  double a0_, b0_, b1_, b2_;
};

enum class FamilyKind { QuadPoly, LinTrig };

/// One periodic coefficient pair (A, B) with closed-form derivatives.
class CoefficientFamily {
 public:
  CoefficientFamily(QuadPoly q) : impl_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  CoefficientFamily(LinTrig l) : impl_(l) {}               // NOLINT(google-explicit-constructor)

  FamilyKind kind() const { return impl_.index() == 0 ? FamilyKind::QuadPoly : FamilyKind::LinTrig; }
  double period() const;
  Jet<double> jet(double t) const;
  double A(double t) const { return jet(t).A; }
  double B(double t) const { return jet(t).B; }

  const QuadPoly* quad() const { return std::get_if<QuadPoly>(&impl_); }
  const LinTrig* trig() const { return std::get_if<LinTrig>(&impl_); }

  std::string describe() const;

 private:
  std::variant<QuadPoly, LinTrig> impl_;
};

}  // namespace abel
