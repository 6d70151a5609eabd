#include "abel/family.hpp"

#include <cmath>
#include <sstream>

namespace abel {

QuadPoly::QuadPoly(Rational t_A, Rational t_B)
    : ta_(std::move(t_A)), tb_(std::move(t_B)), ta_d_(to_double(ta_)), tb_d_(to_double(tb_)) {}

RatPoly QuadPoly::A_poly() const { return RatPoly({Rational(0), Rational(-ta_), Rational(1)}); }

RatPoly QuadPoly::B_poly() const { return RatPoly({tb_, Rational(-(tb_ + 1)), Rational(1)}); }

LinTrig::LinTrig(double a0, double b0, double b1, double b2) : a0_(a0), b0_(b0), b1_(b1), b2_(b2) {
  if (!std::isfinite(a0) || !std::isfinite(b0) || !std::isfinite(b1) || !std::isfinite(b2))
    throw PreconditionError("non-finite trigonometric coefficient");
  if (!(b0 + b2 > 0.0)) throw PreconditionError("canonical trigonometric family requires b0 + b2 > 0");
}

Jet<double> LinTrig::jet(double t) const {
  const double s = std::sin(t);
  const double c = std::cos(t);
  Jet<double> j;
  j.A = a0_ - s - a0_ * c;
  j.dA = -c + a0_ * s;
  j.ddA = s + a0_ * c;
  j.B = b0_ + b1_ * s + b2_ * c;
  j.dB = b1_ * c - b2_ * s;
  j.ddB = -b1_ * s - b2_ * c;
  return j;
}

double CoefficientFamily::period() const {
  return kind() == FamilyKind::QuadPoly ? QuadPoly::period() : LinTrig::period();
}

Jet<double> CoefficientFamily::jet(double t) const {
  return std::visit([t](const auto& f) { return f.jet(t); }, impl_);
}

std::string CoefficientFamily::describe() const {
  std::ostringstream os;
  if (const auto* q = quad()) {
    os << "QuadPoly(t_A=" << to_string(q->t_A()) << ", t_B=" << to_string(q->t_B()) << ")";
  } else {
    const auto* l = trig();
    os << "LinTrig(a0=" << l->a0() << ", b0=" << l->b0() << ", b1=" << l->b1() << ", b2=" << l->b2() << ")";
  }
  return os.str();
}

}  // namespace abel
