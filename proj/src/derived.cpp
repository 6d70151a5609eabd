#include "abel/derived.hpp"

namespace abel {

QuadPolyForms quad_poly_forms(const QuadPoly& q) {
  QuadPolyForms f;
  f.A = q.A_poly();
  f.B = q.B_poly();
  const RatPoly dA = f.A.derivative();
  const RatPoly dB = f.B.derivative();
  f.cross = dA * f.B - f.A * dB;
  f.P = Rational(4) * f.cross - f.B.pow(3);
  f.Q = f.B * (f.A * dB.derivative() - f.B * dA.derivative()) + Rational(3) * dB * f.cross;
  return f;
}

}  // namespace abel
