#include "abel/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "abel/realroots.hpp"

namespace abel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Zeros of a*sin t + b*cos t + c on [0, 2*pi), written as R cos(t - theta) + c.
std::vector<ZeroInfo> trig_zeros(double a, double b, double c) {
  const double r = std::hypot(a, b);
  if (r == 0.0) return {};
  const double ratio = -c / r;
  if (std::abs(ratio) > 1.0 + 1e-15) return {};
  const double theta = std::atan2(a, b);
  auto wrap = [](double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t < 1e-14 || kTwoPi - t < 1e-14) t = 0.0;
    return t;
  };
  if (std::abs(std::abs(ratio) - 1.0) <= 1e-14) return {{wrap(ratio > 0 ? theta : theta + std::numbers::pi), false}};
  const double d = std::acos(ratio);
  std::vector<ZeroInfo> z{{wrap(theta - d), true}, {wrap(theta + d), true}};
  std::sort(z.begin(), z.end(), [](const ZeroInfo& x, const ZeroInfo& y) { return x.location < y.location; });
  return z;
}

void classify(ZeroStructure& zs, double period) {
  std::ostringstream diag;
  const bool zero_at_origin = !zs.zeros_A.empty() && zs.zeros_A.front().location == 0.0;
  std::vector<ZeroInfo> interior_A;
  for (const auto& z : zs.zeros_A)
    if (z.location > 0.0 && z.location < period) interior_A.push_back(z);
  std::vector<ZeroInfo> zeros_B;
  for (const auto& z : zs.zeros_B)
    if (z.location > 0.0 && z.location <= period) zeros_B.push_back(z);

  const bool all_simple = std::all_of(zs.zeros_A.begin(), zs.zeros_A.end(), [](auto& z) { return z.simple; }) &&
                          std::all_of(zs.zeros_B.begin(), zs.zeros_B.end(), [](auto& z) { return z.simple; });
  if (!zero_at_origin) diag << "A(0) != 0; ";
  if (interior_A.size() != 1) diag << "A has " << interior_A.size() << " zeros in (0,T), expected 1; ";
  if (zeros_B.size() != 2) diag << "B has " << zeros_B.size() << " zeros in (0,T], expected 2; ";
  if (!all_simple) diag << "non-simple zero detected; ";

  if (zero_at_origin && interior_A.size() == 1 && zeros_B.size() == 2 && all_simple) {
    const double ta = interior_A.front().location;
    if (zeros_B[0].location < ta && ta < zeros_B[1].location) {
      zs.interleaved = true;
      zs.t_A = ta;
      zs.t_B1 = zeros_B[0].location;
      zs.t_B2 = zeros_B[1].location;
    } else {
      diag << "zeros of B do not straddle t_A; ";
    }
  }
  zs.diagnostic = diag.str();
  if (!zs.diagnostic.empty()) zs.diagnostic.resize(zs.diagnostic.size() - 2);
}

}  // namespace

ZeroStructure check_C1(const CoefficientFamily& fam) {
  ZeroStructure zs;
  const Jet<double> j0 = fam.jet(0.0);
  zs.orientation = sign(j0.dA * j0.B);

  if (const auto* q = fam.quad()) {
    const Rational& ta = q->t_A();
    const Rational& tb = q->t_B();
    // A = t (t - t_A): zeros 0 and t_A, double when t_A = 0.
    if (ta == 0) {
      zs.zeros_A.push_back({0.0, false});
    } else {
      zs.zeros_A.push_back({0.0, true});
      if (ta > 0 && ta <= 1) zs.zeros_A.push_back({to_double(ta), true});
    }
    // B = (t - t_B)(t - 1): zeros t_B and 1, double when t_B = 1.
    if (tb == 1) {
      zs.zeros_B.push_back({1.0, false});
    } else {
      if (tb >= 0 && tb <= 1) zs.zeros_B.push_back({to_double(tb), true});
      zs.zeros_B.push_back({1.0, true});
    }
    std::sort(zs.zeros_B.begin(), zs.zeros_B.end(), [](auto& x, auto& y) { return x.location < y.location; });
    classify(zs, 1.0);
    if (zs.interleaved) {
      zs.exact_t_A = ta;
      zs.exact_t_B1 = tb;
      zs.exact_t_B2 = Rational(1);
    }
    return zs;
  }

  const auto* l = fam.trig();
  zs.zeros_A = trig_zeros(-1.0, -l->a0(), l->a0());
  zs.zeros_B = trig_zeros(l->b1(), l->b2(), l->b0());
  classify(zs, LinTrig::period());
  return zs;
}

RatPoly combination_discriminant_poly(const QuadPoly& q) {
  const Rational& ta = q.t_A();
  const Rational& tb = q.t_B();
  // Disc_t((alpha + 1) t^2 - (alpha t_A + t_B + 1) t + t_B)
  return RatPoly({Rational((tb - 1) * (tb - 1)), Rational(2 * ta * tb + 2 * ta - 4 * tb), Rational(ta * ta)});
}

UniquenessPrecheck uniqueness_precheck(const CoefficientFamily& fam) {
  UniquenessPrecheck out;
  if (const auto* q = fam.quad()) {
    const bool a_changes = q->t_A() > 0 && q->t_A() < 1;
    const bool b_changes = q->t_B() > 0 && q->t_B() < 1;
    if (!a_changes || !b_changes) {
      out.verdict = Uniqueness::AtMostOneBySign;
      out.reason = !a_changes ? "A does not change sign in (0,1)" : "B does not change sign in (0,1)";
      return out;
    }
    const RatPoly d = combination_discriminant_poly(*q);
    const Rational disc = discriminant(d);
    out.exact_combination_discriminant = disc;
    out.combination_discriminant = to_double(disc);
    if (disc >= 0) {
      out.verdict = Uniqueness::AtMostOneByCombination;
      out.reason = "some combination alpha*A + B does not change sign";
    } else {
      out.reason = "every combination alpha*A + B changes sign";
    }
    return out;
  }

  const auto* l = fam.trig();
  const auto za = trig_zeros(-1.0, -l->a0(), l->a0());
  const auto zb = trig_zeros(l->b1(), l->b2(), l->b0());
  auto changes = [](const std::vector<ZeroInfo>& z) { return z.size() == 2 && z[0].simple && z[1].simple; };
  if (!changes(za) || !changes(zb)) {
    out.verdict = Uniqueness::AtMostOneBySign;
    out.reason = !changes(za) ? "A does not change sign" : "B does not change sign";
    return out;
  }

  // Half-angle coordinate z = tan((t - s)/2) with the point at infinity t = s + pi
  // placed in the middle of the largest gap between zeros.
  std::vector<double> all{za[0].location, za[1].location, zb[0].location, zb[1].location};
  std::sort(all.begin(), all.end());
  double best_gap = -1.0, far_point = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double next = i + 1 < all.size() ? all[i + 1] : all[0] + kTwoPi;
    if (next - all[i] > best_gap) {
      best_gap = next - all[i];
      far_point = 0.5 * (all[i] + next);
    }
  }
  const double s = far_point - std::numbers::pi;
  auto to_z = [s](double t) { return std::tan(0.5 * (t - s)); };
  const double a = fam.A(far_point);
  const double b = fam.B(far_point);
  const double za1 = to_z(za[0].location), za2 = to_z(za[1].location);
  const double zb1 = to_z(zb[0].location), zb2 = to_z(zb[1].location);
  const double prod = 16.0 * a * a * b * b * (za1 - zb1) * (za2 - zb1) * (za1 - zb2) * (za2 - zb2);
  out.combination_discriminant = prod;
  if (prod >= 0.0) {
    out.verdict = Uniqueness::AtMostOneByCombination;
    out.reason = "zeros of A and B do not interleave";
  } else {
    out.reason = "zeros of A and B interleave";
  }
  return out;
}

const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::AtMostOneBySign: return "AtMostOneBySign";
    case Uniqueness::AtMostOneByCombination: return "AtMostOneByCombination";
    case Uniqueness::Inconclusive: return "Inconclusive";
  }
  return "?";
}

}  // namespace abel
