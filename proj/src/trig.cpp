#include "abel/trig.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <gmpxx.h>
#include <numbers>
#include <sstream>

#include "abel/derived.hpp"
#include "abel/realroots.hpp"

namespace abel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double snap(double v, double scale) { return std::abs(v) <= 1e-14 * scale ? 0.0 : v; }

struct Trip {
  double c0, s, c;  // c0 + s sin t + c cos t
};

Trip shifted(const Trip& f, double sh) {
  return {f.c0, f.s * std::cos(sh) - f.c * std::sin(sh), f.s * std::sin(sh) + f.c * std::cos(sh)};
}

constexpr int kSqrtBits = 256;

/// Exact square root of a nonnegative rational when it is a perfect square, otherwise a
/// kSqrtBits-bit floating approximation converted back to a rational.
Rational sqrt_rational(const Rational& r) {
  mpz_class n = r.get_num(), d = r.get_den();
  if (mpz_perfect_square_p(n.get_mpz_t()) && mpz_perfect_square_p(d.get_mpz_t())) {
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
    Rational out(sn, sd);
    out.canonicalize();
    return out;
  }
  mpf_class f(r, kSqrtBits);
  mpf_class s(0, kSqrtBits);
  mpf_sqrt(s.get_mpf_t(), f.get_mpf_t());
  Rational out(s);
  out.canonicalize();
  return out;
}

}  // namespace

Normalization normalize(const GeneralTrig& g) {
  Normalization out;
  const double R = std::hypot(g.a2, g.a3);
  const double scaleA = std::max({std::abs(g.a1), std::abs(g.a2), std::abs(g.a3)});
  if (scaleA == 0.0) throw PreconditionError("A vanishes identically");
  if (R == 0.0 || std::abs(g.a1) > R * (1 + 1e-14)) {
    out.note = "no canonical form; A sign-definite";
    return out;
  }
  if (std::abs(std::abs(g.a1) - R) <= 1e-14 * R) throw PreconditionError("A has only a double zero");
  const double theta = std::atan2(g.a2, g.a3);
  double ts = theta + std::acos(-g.a1 / R);
  ts = std::fmod(ts, kTwoPi);
  if (ts < 0) ts += kTwoPi;
  if (std::abs(ts - kTwoPi) < 1e-15) ts = 0.0;
  out.shift = ts;

  Trip A = shifted({g.a1, g.a2, g.a3}, ts);
  Trip B = shifted({g.b1, g.b2, g.b3}, ts);
  const double scaleB = std::max({std::abs(g.b1), std::abs(g.b2), std::abs(g.b3), 1e-300});
  const double B0 = snap(B.c0 + B.c, scaleB);
  if (B0 == 0.0) throw PreconditionError("B vanishes at the zero of A");
  if (B0 < 0.0) {
    out.time_reversed = true;
    A = {-A.c0, A.s, -A.c};
    B = {-B.c0, B.s, -B.c};
  }
  const double k = -A.s;  // -A'(0) > 0
  out.scale = std::sqrt(k);
  A = {A.c0 / k, A.s / k, A.c / k};
  B = {B.c0 / out.scale, B.s / out.scale, B.c / out.scale};
  const double a0 = snap(A.c0, 1.0);
  out.family = LinTrig(a0, snap(B.c0, scaleB), snap(B.s, scaleB), snap(B.c, scaleB));
  std::ostringstream os;
  os << "shift " << out.shift << (out.time_reversed ? ", time reversed" : "") << ", scale " << out.scale;
  out.note = os.str();
  return out;
}

RationalCoeffPair half_angle_pair(const LinTrig& l) {
  RationalCoeffPair p;
  const Rational a0 = from_double(l.a0()), b0 = from_double(l.b0()), b1 = from_double(l.b1()),
                 b2 = from_double(l.b2());
  p.Abar = RatPoly{2 * a0, Rational(2)};
  p.Bbar = RatPoly{b0 - b2, -2 * b1, b0 + b2};
  p.zeros_A = {-l.a0()};
  const double a = l.b0() + l.b2(), b = -2 * l.b1(), c = l.b0() - l.b2();
  const double disc = b * b - 4 * a * c;
  if (disc >= 0) {
    const double s = std::sqrt(disc);
    p.zeros_B = {(-b - s) / (2 * a), (-b + s) / (2 * a)};
  }
  return p;
}

RatPoly pbar_numerator(const RationalCoeffPair& pair) {
  const RatPoly& NA = pair.Abar;
  const RatPoly& NB = pair.Bbar;
  const RatPoly w = RatPoly{Rational(1), Rational(0), Rational(1)};
  return Rational(2) * (NB * NA.derivative() - NA * NB.derivative()) * w * w - NB.pow(3);
}

RatPoly p_poly(const Rational& b2, const Rational& zB) {
  const Rational s = b2 * b2;
  const Rational z2 = zB * zB, z3 = z2 * zB, z5 = z3 * z2;
  const Rational m = zB - 3 * z3 + z5;
  return RatPoly{(s - 4) * z3,
                 3 * s * z2 * (z2 - 1),
                 3 * (-4 * z3 + s * m),
                 s * (z2 - 1) * (z2 * z2 - 8 * z2 + 1),
                 -3 * (4 * z3 + s * m),
                 3 * s * z2 * (z2 - 1),
                 -(s + 4) * z3};
}

Rational delta_expression(const Rational& b2, const Rational& zB) {
  auto pw = [](const Rational& x, int k) {
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  };
  const Rational w = zB * zB + 1;
  return 186624 * pw(b2, 8) * (b2 * b2 + 4) * pw(zB, 15) * pw(w, 12) * (pw(b2, 4) * pw(w, 6) - 1024 * pw(zB, 6));
}

const char* to_string(C2Region r) {
  switch (r) {
    case C2Region::QNegative: return "QNegative";
    case C2Region::B2Large: return "B2Large";
    case C2Region::Other: return "Other";
  }
  return "?";
}

QRegion q_and_region(double b1, double b2) {
  if (!(b2 > 0.0)) throw PreconditionError("b2 must be positive");
  QRegion r;
  r.q = std::sqrt(b1 * b1 + b2 * b2) / std::cbrt(b2) - std::cbrt(4.0);
  const Rational B1 = from_double(b1), B2 = from_double(b2);
  const Rational n = B1 * B1 + B2 * B2;
  r.q_sign = sign(n * n * n - 16 * B2 * B2);
  if (r.q_sign < 0)
    r.region = C2Region::QNegative;
  else if (b2 > 2.0)
    r.region = C2Region::B2Large;
  else
    r.region = C2Region::Other;
  r.zB = (B1 + sqrt_rational(n)) / B2;
  r.p = p_poly(B2, r.zB);
  r.delta_sign = sign(delta_expression(B2, r.zB));
  const Rational bound = root_bound(r.p);
  r.real_roots = sturm_count(r.p, Interval(-bound, bound));
  return r;
}

NoC3Witness noC3_witness(double b1, double b2) {
  if (!(b2 > 0.0)) throw PreconditionError("b2 must be positive");
  NoC3Witness w;
  double t1 = std::atan(b1 / b2);
  if (t1 < 0) t1 += kPi;
  const LinTrig fam(0.0, 0.0, b1, b2);
  for (double t : {t1, t1 + kPi}) {
    const double s2 = std::sin(2 * t);
    if (std::abs(s2) < 1e-12) continue;
    const double c = std::cos(t);
    const double disc = b2 * b2 + 4 * c * c * c;
    if (disc < 0) continue;
    for (double sgn : {1.0, -1.0}) {
      const double x = (b2 + sgn * std::sqrt(disc)) / s2;
      if (!(x > 0.0)) continue;
      const auto j = fam.jet(t);
      const double v = std::abs(certificate_v(j, x)), vd = std::abs(certificate_v_dot(j, x));
      if (v < 1e-9 && vd < 1e-9) {
        w.t = t;
        w.x = x;
        w.v_residual = v;
        w.vdot_residual = vd;
        return w;
      }
    }
  }
  w.degenerate = true;
  return w;
}

const char* to_string(EquilibriumType e) {
  switch (e) {
    case EquilibriumType::Saddle: return "Saddle";
    case EquilibriumType::UnstableNodeFocus: return "UnstableNodeFocus";
    case EquilibriumType::StableNodeFocus: return "StableNodeFocus";
    case EquilibriumType::Degenerate: return "Degenerate";
  }
  return "?";
}

namespace {

Equilibrium classify_equilibrium(const LinTrig& l, double t) {
  const auto j = l.jet(t);
  Equilibrium e;
  e.t = t;
  e.trace = -j.B;
  e.det = j.dA;
  if (e.det < 0)
    e.type = EquilibriumType::Saddle;
  else if (e.det > 0 && e.trace > 0)
    e.type = EquilibriumType::UnstableNodeFocus;
  else if (e.det > 0 && e.trace < 0)
    e.type = EquilibriumType::StableNodeFocus;
  else
    e.type = EquilibriumType::Degenerate;
  return e;
}

struct Shot {
  std::vector<ManifoldSample> samples;
  std::optional<double> y_at_target;
  bool unbounded = false;
  std::string note;
};

/// Follows t' = dir*y, y' = dir*(-B y - A) from (t0, y0) until t reaches `target`.
/// The last stretch before the section is integrated with t as the variable.
Shot shoot(const LinTrig& l, double t0, double y0, double dir, double target, const InfinityOptions& o,
           bool keep_samples) {
  Shot out;
  using S2 = std::array<double, 2>;
  auto planar = [&](const S2& y, S2& dy, double) {
    const auto j = l.jet(y[0]);
    dy[0] = dir * y[1];
    dy[1] = dir * (-j.B * y[1] - j.A);
  };
  S2 y{t0, y0};
  S2 prev = y;
  auto observe = [&](double, const S2& s) {
    if (keep_samples) out.samples.push_back({s[0], s[1]});
  };
  enum class Why { None, Section, Zero, Escape } why = Why::None;
  auto stop = [&](double, const S2& s) {
    if (dir * (s[0] - target) >= 0.0) why = Why::Section;
    else if (s[1] <= 0.0) why = Why::Zero;
    else if (s[1] > o.y_escape) why = Why::Escape;
    else prev = s;
    return why != Why::None;
  };
  const auto& io = o.integrator;
  detail::drive<2>(planar, y, 0.0, 1e4, io.abs_tol, io.rel_tol, io.max_steps, observe, stop);
  switch (why) {
    case Why::Section: {
      std::array<double, 1> z{prev[1]};
      auto yeq = [&](const std::array<double, 1>& s, std::array<double, 1>& ds, double t) {
        const auto j = l.jet(t);
        ds[0] = -j.B - j.A / s[0];
      };
      detail::drive<1>(yeq, z, prev[0], target, io.abs_tol, io.rel_tol, io.max_steps, [](double, const auto&) {},
                       [](double, const auto&) { return false; });
      out.y_at_target = z[0];
      if (keep_samples) {
        out.samples.pop_back();
        out.samples.push_back({target, z[0]});
      }
      break;
    }
    case Why::Zero: {
      std::ostringstream os;
      os << "branch reaches y = 0 near t = " << y[0];
      out.note = os.str();
      break;
    }
    case Why::Escape: {
      std::ostringstream os;
      os << "no connection, unbounded branch near t = " << y[0];
      out.note = os.str();
      out.unbounded = true;
      break;
    }
    case Why::None: out.note = "section not reached"; break;
  }
  return out;
}

double lambda_pm(double s, int which) { return (-s + which * std::sqrt(s * s + 4.0)) / 2.0; }

ManifoldBranch branch(const LinTrig& l, bool unstable, double target, const InfinityOptions& o) {
  const double s = l.b0() + l.b2();
  const double eps = o.launch_offset;
  auto launch = [&](double e) {
    if (unstable) return shoot(l, e, e * lambda_pm(s, +1), 1.0, target, o, true);
    return shoot(l, kTwoPi - e, -e * lambda_pm(s, -1), -1.0, target, o, true);
  };
  const Shot a = launch(eps);
  ManifoldBranch b;
  b.samples = a.samples;
  b.unbounded = a.unbounded;
  b.note = a.note;
  if (!unstable) std::reverse(b.samples.begin(), b.samples.end());
  if (a.y_at_target) {
    const Shot h = launch(eps / 2);
    b.y_at_section = h.y_at_target ? 2.0 * *h.y_at_target - *a.y_at_target : a.y_at_target;
  }
  return b;
}

/// One period of the Poincare map of the equation at infinity, starting at (0, y0).
std::optional<double> infinity_return(const LinTrig& l, double y0, const InfinityOptions& o) {
  return shoot(l, 0.0, y0, 1.0, kTwoPi, o, false).y_at_target;
}

std::optional<int> homoclinic_sign(const LinTrig& l, const InfinityOptions& o) {
  std::optional<int> result;
  for (double y0 : {1e-3, 1e-4}) {
    const auto p = infinity_return(l, y0, o);
    const int sg = p ? (*p > y0 ? 1 : (*p < y0 ? -1 : 0)) : -1;
    if (result && *result != sg) return std::nullopt;
    result = sg;
  }
  return result;
}

/// w = u/x along one period: w' = x^2 A w^3 + x B w^2, w(0) = 1. Returns x - u(T, x).
double contraction(const LinTrig& l, double x, const IntegratorOptions& io) {
  std::array<double, 1> w{1.0};
  auto f = [&](const std::array<double, 1>& s, std::array<double, 1>& ds, double t) {
    const auto j = l.jet(t);
    ds[0] = x * x * j.A * s[0] * s[0] * s[0] + x * j.B * s[0] * s[0];
  };
  detail::drive<1>(f, w, 0.0, kTwoPi, 1e-18, 1e-14, io.max_steps, [](double, const auto&) {},
                   [](double, const auto&) { return false; });
  return x * (1.0 - w[0]);
}

}  // namespace

std::optional<double> manifold_mismatch(const LinTrig& fam, const InfinityOptions& opts) {
  const auto v = branch(fam, true, kPi, opts);
  const auto w = branch(fam, false, kPi, opts);
  if (!v.y_at_section || !w.y_at_section) return std::nullopt;
  return *v.y_at_section - *w.y_at_section;
}

DecayEstimate decay_of_infinity(const LinTrig& fam, double x0, const InfinityOptions& opts) {
  DecayEstimate d;
  d.x_start = x0;
  d.target = opts.decay_target;
  d.x_switch = std::max(opts.decay_switch, opts.decay_target);
  IntegratorOptions io = opts.integrator;
  io.keep_trajectory = false;
  double x = x0;
  while (x > d.x_switch && d.periods_direct < opts.decay_direct_max) {
    const auto r = integrate_with_variations(fam, x, io);
    if (!r.completed()) throw NumericalError("solution from infinity escaped");
    if (!(r.u_T < x)) return d;
    x = r.u_T;
    ++d.periods_direct;
  }
  if (x > d.x_switch) return d;
  if (x <= d.target) {
    d.reached = true;
    return d;
  }
  // Periods needed to go from x down to the target: sum over iterations of 1, approximated by
  // the integral of dx / (x - P(x)), written in log x.
  bool monotone = true;
  auto integrand = [&](double lx) {
    const double xx = std::exp(lx);
    const double c = contraction(fam, xx, io);
    if (!(c > 0.0)) {
      monotone = false;
      return 0.0;
    }
    return xx / c;
  };
  d.periods_accelerated = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, std::log(d.target), std::log(x), 10, 1e-8);
  d.reached = monotone && std::isfinite(d.periods_accelerated);
  return d;
}

InfinityReport infinity_analysis(const LinTrig& fam, const InfinityOptions& opts) {
  InfinityReport r;
  const double s = fam.b0() + fam.b2();
  r.lambda_minus = lambda_pm(s, -1);
  r.lambda_plus = lambda_pm(s, +1);
  Eigen::Matrix2d J;
  J << 0.0, 1.0, 1.0, -s;
  Eigen::EigenSolver<Eigen::Matrix2d> es(J);
  auto ev = es.eigenvalues().real();
  r.lambda_minus_check = std::min(ev(0), ev(1));
  r.lambda_plus_check = std::max(ev(0), ev(1));

  const auto zs = check_C1(fam);
  r.equilibria.push_back(classify_equilibrium(fam, 0.0));
  for (const auto& z : zs.zeros_A)
    if (z.location > 0.0 && z.location < kTwoPi) r.equilibria.push_back(classify_equilibrium(fam, z.location));

  r.unstable = branch(fam, true, kPi, opts);
  r.stable = branch(fam, false, kPi, opts);
  if (r.unstable.y_at_section && r.stable.y_at_section) {
    r.mismatch = *r.unstable.y_at_section - *r.stable.y_at_section;
    r.connection = std::abs(*r.mismatch) < opts.match_tol;
  }
  if (r.connection) {
    r.homoclinic_stability_sign = homoclinic_sign(fam, opts);
    std::ostringstream os;
    os << "expected homoclinic sign " << -(s > 0 ? 1 : -1);
    r.notes.push_back(os.str());
  } else {
    r.notes.push_back("no connection at infinity");
  }

  // Continue v_inf to t = 2 pi; when it gets there u_inf = 1/v_inf is a finite solution.
  const Shot full = shoot(fam, opts.launch_offset, opts.launch_offset * r.lambda_plus, 1.0, kTwoPi, opts, false);
  if (!r.connection && full.y_at_target && *full.y_at_target > 0.0) {
    r.decay = decay_of_infinity(fam, 1.0 / *full.y_at_target, opts);
  } else if (!full.y_at_target) {
    r.notes.push_back("v_inf does not reach t = 2 pi: " + full.note);
  }

  IntegratorOptions io = opts.integrator;
  io.keep_trajectory = false;
  for (int i = 0; i < 20; ++i) {
    const double x = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
    const auto f = integrate_with_variations(fam, x, io);
    if (f.completed()) r.return_map.emplace_back(x, f.u_T);
  }
  return r;
}

ConnectionScan scan_connection_b0(double a0, double b1, double b2, double b0_lo, double b0_hi, int steps,
                                  const InfinityOptions& opts) {
  if (steps < 1 || !(b0_hi > b0_lo)) throw PreconditionError("empty scan range");
  ConnectionScan out;
  auto mism = [&](double b0) -> std::optional<double> {
    if (!(b0 + b2 > 0.0)) return std::nullopt;
    return manifold_mismatch(LinTrig(a0, b0, b1, b2), opts);
  };
  for (int i = 0; i <= steps; ++i) {
    const double b0 = b0_lo + (b0_hi - b0_lo) * i / steps;
    out.mismatches.emplace_back(b0, mism(b0));
  }
  for (std::size_t i = 0; i + 1 < out.mismatches.size(); ++i) {
    const auto& [x0, m0] = out.mismatches[i];
    const auto& [x1, m1] = out.mismatches[i + 1];
    if (!m0 || !m1 || (*m0 > 0) == (*m1 > 0)) continue;
    double lo = x0, hi = x1, mlo = *m0;
    for (int it = 0; it < 50 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto mm = mism(mid);
      if (!mm) break;
      if ((*mm > 0) == (mlo > 0))
        lo = mid, mlo = *mm;
      else
        hi = mid;
    }
    const double b0 = 0.5 * (lo + hi);
    out.b0 = b0;
    out.expected_sign = (b0 + b2) > 0 ? -1 : 1;
    out.homoclinic_stability_sign = homoclinic_sign(LinTrig(a0, b0, b1, b2), opts);
    break;
  }
  return out;
}

}  // namespace abel
