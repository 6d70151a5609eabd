#include "abel/criteria.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "abel/derived.hpp"
#include "abel/realroots.hpp"
#include "abel/trig.hpp"

namespace abel {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(CertificateMethod m) { return m == CertificateMethod::Exact ? "exact" : "numeric"; }

bool negative_on_halfline(const Rational& a, const Rational& b, const Rational& c) {
  if (sign(c) >= 0) return false;
  if (sign(a) > 0) return false;
  if (sign(b) <= 0) return true;
  if (sign(a) == 0) return false;
  return b * b < 4 * a * c;
}

bool negative_on_halfline(double a, double b, double c) {
  if (!(c < 0.0) || a > 0.0) return false;
  if (b <= 0.0) return true;
  if (a == 0.0) return false;
  return b * b < 4.0 * a * c;
}

namespace {

template <class F>
double solve_bracketed(F&& f, double a, double b, double fa, double fb) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

/// Zeros of f on (lo, hi): sign changes on an n-point grid plus touching pairs found by
/// minimizing |f| between samples where the grid shows a local extremum of one sign.
template <class F>
std::vector<double> guarded_roots(F&& f, double lo, double hi, int n, double scale) {
  std::vector<double> ts(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = lo + (hi - lo) * i / n;
    fs[i] = f(ts[i]);
  }
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0 && i > 0) roots.push_back(ts[i]);
    if (fs[i] * fs[i + 1] < 0.0) roots.push_back(solve_bracketed(f, ts[i], ts[i + 1], fs[i], fs[i + 1]));
  }
  for (int i = 1; i < n; ++i) {
    const double s = fs[i] > 0 ? 1.0 : -1.0;
    if (fs[i] == 0.0 || s * fs[i - 1] <= 0.0 || s * fs[i + 1] <= 0.0) continue;
    if (s * fs[i] > s * fs[i - 1] || s * fs[i] > s * fs[i + 1]) continue;
    if (std::abs(fs[i]) > 1e-3 * scale) continue;
    const auto m = boost::math::tools::brent_find_minima([&](double t) { return s * f(t); }, ts[i - 1], ts[i + 1], 52);
    if (m.second <= 0.0) {
      roots.push_back(solve_bracketed(f, ts[i - 1], m.first, fs[i - 1], f(m.first)));
      roots.push_back(solve_bracketed(f, m.first, ts[i + 1], f(m.first), fs[i + 1]));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

int count_in(const std::vector<double>& roots, double lo, double hi) {
  return static_cast<int>(std::count_if(roots.begin(), roots.end(), [&](double t) { return t > lo && t < hi; }));
}

int exact_open_count(const RatPoly& p, Rational lo, Rational hi, std::vector<std::string>& notes) {
  const Rational eps = make_rational(1, 1000000000000L);
  if (p.sign_at(lo) == 0) {
    notes.push_back("P vanishes at " + to_string(lo) + "; interval shrunk by 1e-12");
    lo += eps;
  }
  if (p.sign_at(hi) == 0) {
    notes.push_back("P vanishes at " + to_string(hi) + "; interval shrunk by 1e-12");
    hi -= eps;
  }
  if (lo >= hi) return 0;
  return sturm_count(p, Interval(lo, hi));
}

int variations3(int a, int b, int c) {
  SignSequence s;
  s.values = {a, b, c};
  return s.variations();
}

std::optional<double> largest_positive_root(double a, double b, double c) {
  std::optional<double> best;
  auto consider = [&](double x) {
    if (x > 0.0 && std::isfinite(x) && (!best || x > *best)) best = x;
  };
  if (a == 0.0) {
    if (b != 0.0) consider(-c / b);
    return best;
  }
  const double disc = b * b - 4 * a * c;
  if (disc < 0.0) return best;
  const double sq = std::sqrt(disc);
  consider((-b + sq) / (2 * a));
  consider((-b - sq) / (2 * a));
  return best;
}

void require_c1(const ZeroStructure& zs) {
  if (!zs.interleaved) throw PreconditionError("(C1) fails: " + zs.diagnostic);
}

C2Report c2_quad(const QuadPoly& q, const ZeroStructure& zs) {
  C2Report r;
  r.method = CertificateMethod::Exact;
  const auto forms = quad_poly_forms(q);
  const int n1 = exact_open_count(forms.P, Rational(0), *zs.exact_t_B1, r.notes);
  const int n2 = exact_open_count(forms.P, *zs.exact_t_A, *zs.exact_t_B2, r.notes);
  r.P_zero_count_J1 = n1;
  r.P_zero_count_J2 = n2;
  r.verdict = (n1 <= 1 && n2 <= 1) ? Verdict::True : Verdict::False;
  return r;
}

C2Report c2_trig(const LinTrig& l, const ZeroStructure& zs) {
  C2Report r;
  r.method = CertificateMethod::Numeric;
  const auto d = derived_functions(l);
  auto P = [&](double t) { return d.P(t); };
  double scale = 0.0;
  for (int i = 0; i <= 256; ++i) scale = std::max(scale, std::abs(P(LinTrig::period() * i / 256)));
  const int n1 = count_in(guarded_roots(P, 0.0, *zs.t_B1, 2000, scale), 0.0, *zs.t_B1);
  const int n2 = count_in(guarded_roots(P, *zs.t_A, *zs.t_B2, 2000, scale), *zs.t_A, *zs.t_B2);
  r.P_zero_count_J1 = n1;
  r.P_zero_count_J2 = n2;
  bool region_certified = false;
  if (l.a0() == 0.0 && l.b0() == 0.0) {
    const auto reg = q_and_region(l.b1(), l.b2());
    std::ostringstream os;
    os << "q = " << reg.q << ", region " << to_string(reg.region);
    r.notes.push_back(os.str());
    region_certified = reg.region != C2Region::Other;
  }
  if (region_certified || (n1 <= 1 && n2 <= 1)) {
    r.verdict = Verdict::True;
    if (region_certified && (n1 > 1 || n2 > 1)) r.notes.push_back("sampled count disagrees with the region test");
  } else {
    r.verdict = Verdict::Unknown;
    r.notes.push_back("more than one sampled zero of P in a J interval; the sufficient test is inconclusive");
  }
  return r;
}

C3Report c3_quad(const QuadPoly& q) {
  C3Report r;
  r.method = CertificateMethod::Exact;
  const auto f = quad_poly_forms(q);
  const Rational zero(0), one(1);
  r.v_t0_negative = f.cross.sign_at(zero) < 0 && f.cross.sign_at(one) < 0 && sturm_count(f.cross, Interval(zero, one)) == 0;
  auto boundary = [&](const Rational& t) {
    const auto j = q.jet(t);
    return negative_on_halfline(4 * j.A * j.A * j.B, 4 * j.A * j.B * j.B, 4 * cross_term(j));
  };
  r.v_0x_negative = boundary(zero);
  r.v_Tx_negative = boundary(one);

  const RatPoly sq = squarefree_part(f.Q);
  for (Interval iv : isolate_real_roots(sq)) {
    if (iv.contains(zero) && sq.sign_at(zero) == 0) continue;
    if (iv.contains(one) && sq.sign_at(one) == 0) continue;
    while ((iv.lo < zero && iv.hi > zero) || (iv.lo < one && iv.hi > one))
      iv = refine_root(sq, iv, iv.width() / 2);
    if (iv.lo < zero || iv.hi > one) continue;
    iv = refine_root(sq, iv, make_rational(1, 1000000000000000L));
    QRootInfo info;
    info.t = iv.approx_midpoint();
    info.width = to_double(iv.width());
    info.sign_A = sign_at_root(f.A, sq, iv);
    info.sign_B = sign_at_root(f.B, sq, iv);
    info.sign_cross = sign_at_root(f.cross, sq, iv);
    info.sign_P = sign_at_root(f.P, sq, iv);
    if (info.sign_A == 0 || info.sign_B == 0) {
      info.positive_v_root = info.sign_cross == 0;
    } else {
      const bool real = -info.sign_B * info.sign_P >= 0;
      info.positive_v_root = real && variations3(info.sign_B, info.sign_A, info.sign_cross) > 0;
    }
    if (info.positive_v_root) {
      const auto j = q.jet(info.t);
      info.x_root = largest_positive_root(4 * j.A * j.A * j.B, 4 * j.A * j.B * j.B, 4 * cross_term(j));
    }
    r.Q_roots.push_back(info);
  }
  const bool roots_ok = std::none_of(r.Q_roots.begin(), r.Q_roots.end(), [](const QRootInfo& i) { return i.positive_v_root; });
  r.verdict = (r.v_t0_negative && r.v_0x_negative && r.v_Tx_negative && roots_ok) ? Verdict::True : Verdict::False;
  return r;
}

C3Report c3_trig(const LinTrig& l) {
  C3Report r;
  r.method = CertificateMethod::Numeric;
  const double T = LinTrig::period();
  const auto d = derived_functions(l);

  double worst = -std::numeric_limits<double>::infinity(), t_worst = 0.0;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n, c = d.cross(t);
    if (c > worst) worst = c, t_worst = t;
  }
  const auto m = boost::math::tools::brent_find_minima([&](double t) { return -d.cross(t); },
                                                       std::max(0.0, t_worst - T / n), std::min(T, t_worst + T / n), 52);
  worst = std::max(worst, -m.second);
  r.v_t0_negative = worst < 0.0;
  auto boundary = [&](double t) {
    const auto j = l.jet(t);
    return negative_on_halfline(4 * j.A * j.A * j.B, 4 * j.A * j.B * j.B, 4 * cross_term(j));
  };
  r.v_0x_negative = boundary(0.0);
  r.v_Tx_negative = boundary(T);

  double qscale = 0.0;
  for (int i = 0; i <= 256; ++i) qscale = std::max(qscale, std::abs(d.Q(T * i / 256)));
  bool witness = false;
  for (double t : guarded_roots([&](double s) { return d.Q(s); }, 0.0, T, 4000, qscale)) {
    if (t <= 0.0 || t >= T) continue;
    const auto j = l.jet(t);
    const double a = 4 * j.A * j.A * j.B, b = 4 * j.A * j.B * j.B, c = 4 * cross_term(j);
    QRootInfo info;
    info.t = t;
    info.width = T * 1e-15;
    auto sg = [](double x) { return std::abs(x) < 1e-13 ? 0 : (x > 0 ? 1 : -1); };
    info.sign_A = sg(j.A);
    info.sign_B = sg(j.B);
    info.sign_cross = sg(cross_term(j));
    info.sign_P = sg(certificate_P(j));
    info.x_root = largest_positive_root(a, b, c);
    info.positive_v_root = info.x_root.has_value();
    if (info.positive_v_root) {
      const double x = *info.x_root;
      const double vscale = std::abs(a) * x * x + std::abs(b) * x + std::abs(c);
      if (std::abs(certificate_v(j, x)) < 1e-8 * vscale) witness = true;
    }
    r.Q_roots.push_back(info);
  }
  if (l.a0() == 0.0 && l.b0() == 0.0) {
    const auto w = noC3_witness(l.b1(), l.b2());
    std::ostringstream os;
    if (w.degenerate)
      os << "closed-form witness degenerate";
    else
      os << "closed-form witness t = " << w.t << ", x = " << w.x << ", |v| = " << w.v_residual
         << ", |vdot| = " << w.vdot_residual;
    r.notes.push_back(os.str());
  }
  const bool boundary_ok = r.v_t0_negative && r.v_0x_negative && r.v_Tx_negative;
  if (boundary_ok && r.Q_roots.size() == static_cast<std::size_t>(std::count_if(
                         r.Q_roots.begin(), r.Q_roots.end(), [](const QRootInfo& i) { return !i.positive_v_root; })))
    r.verdict = Verdict::True;
  else if (witness || !boundary_ok)
    r.verdict = Verdict::False;
  else
    r.verdict = Verdict::Unknown;
  if (witness) r.notes.push_back("v and its derivative along the flow vanish together at a zero of Q");
  return r;
}

}  // namespace

C2Report certify_C2(const CoefficientFamily& fam) {
  const auto zs = check_C1(fam);
  require_c1(zs);
  if (const auto* q = fam.quad()) return c2_quad(*q, zs);
  return c2_trig(*fam.trig(), zs);
}

C3Report certify_C3(const CoefficientFamily& fam) {
  require_c1(check_C1(fam));
  if (const auto* q = fam.quad()) return c3_quad(*q);
  return c3_trig(*fam.trig());
}

CriteriaReport criteria_report(const CoefficientFamily& fam) {
  CriteriaReport r;
  r.c1 = check_C1(fam);
  if (!r.c1.interleaved) {
    r.notes.push_back("(C1) fails; certificates not evaluated: " + r.c1.diagnostic);
    r.c2.notes.push_back("not evaluated");
    r.c3.notes.push_back("not evaluated");
    r.c2.method = r.c3.method = fam.quad() ? CertificateMethod::Exact : CertificateMethod::Numeric;
    return r;
  }
  r.c2 = certify_C2(fam);
  r.c3 = certify_C3(fam);
  return r;
}

double AlphaBetaDiagnostics::beta_at(double t) const {
  const auto s = trajectory.at(t);
  return s[1] / s[0];
}

double AlphaBetaDiagnostics::g_at(double t) const {
  const auto j = family->jet(t);
  return 2 * j.A * trajectory.at(t)[0] + j.B;
}

std::optional<double> AlphaBetaDiagnostics::alpha_at(double t) const {
  const double g = g_at(t);
  if (g == 0.0) return std::nullopt;
  return 3.0 - family->B(t) / g;
}

AlphaBetaDiagnostics alpha_beta_diagnostics(const CoefficientFamily& fam, const CycleRecord& cycle,
                                            const AlphaBetaOptions& opts) {
  if (opts.samples < 16) throw PreconditionError("alpha/beta sampling needs at least 16 points");
  const auto zs = check_C1(fam);
  require_c1(zs);
  if (std::abs(cycle.multiplier - 1.0) > opts.singular_band)
    throw PreconditionError("cycle is not near-singular");

  AlphaBetaDiagnostics out;
  out.family = fam;
  out.cycle = cycle;
  IntegratorOptions io = opts.integrator;
  io.keep_trajectory = true;
  auto flow = integrate_with_variations(fam, cycle.x_star, io);
  if (!flow.completed() || !flow.trajectory) throw NumericalError("closed solution escaped");
  out.trajectory = std::move(*flow.trajectory);

  const double T = fam.period();
  const int n = opts.samples - 1;
  out.samples.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n;
    const auto s = out.trajectory.at(t);
    const auto j = fam.jet(t);
    AlphaBetaSample a;
    a.t = t;
    a.u = s[0];
    a.ux = s[1];
    a.g = 2 * j.A * a.u + j.B;
    if (a.g != 0.0) a.alpha = 3.0 - j.B / a.g;
    a.beta = a.ux / a.u;
    a.v = certificate_v(j, a.u);
    out.samples.push_back(a);
  }
  out.beta0 = out.samples.front().beta;

  auto g = [&](double t) { return out.g_at(t); };
  for (int i = 0; i < n; ++i) {
    const auto& a = out.samples[i];
    const auto& b = out.samples[i + 1];
    if (a.g == 0.0 && i > 0) out.g_zeros.push_back(a.t);
    if (a.g * b.g < 0.0) out.g_zeros.push_back(solve_bracketed(g, a.t, b.t, a.g, b.g));
  }
  const double tA = *zs.t_A;
  const int before = count_in(out.g_zeros, 0.0, tA + 1e-300);
  const int after = count_in(out.g_zeros, tA, T + 1e-300);
  out.c2_direct = before == 1 && after == 1;
  if (!out.c2_direct) {
    std::ostringstream os;
    os << "2Au+B has " << before << " zero(s) in [0,t_A] and " << after << " in [t_A,T]";
    out.notes.push_back(os.str());
  }
  for (double z : out.g_zeros) {
    if (z <= tA && !out.t1) out.t1 = z;
    if (z > tA && !out.t2) out.t2 = z;
  }
  if (out.t1 && out.t2)
    out.ordering_ok = 0.0 < *out.t1 && *out.t1 < *zs.t_B1 && *zs.t_B1 < tA && tA < *out.t2 && *out.t2 < *zs.t_B2;

  out.alpha_decreasing = true;
  for (int i = 0; i < n; ++i) {
    const auto& a = out.samples[i];
    const auto& b = out.samples[i + 1];
    if (!a.alpha || !b.alpha || a.g * b.g <= 0.0) continue;
    if (*b.alpha > *a.alpha + 1e-12 * std::max(1.0, std::abs(*a.alpha))) out.alpha_decreasing = false;
  }

  out.c3_direct = std::all_of(out.samples.begin(), out.samples.end(), [](const AlphaBetaSample& s) { return s.v < 0.0; });

  if (out.t1 && out.t2) {
    const double b1 = out.beta_at(*out.t1), b2 = out.beta_at(*out.t2);
    double bmax = -std::numeric_limits<double>::infinity(), bmin = std::numeric_limits<double>::infinity();
    for (const auto& s : out.samples) bmax = std::max(bmax, s.beta), bmin = std::min(bmin, s.beta);
    const double tol = 1e-12 * std::max(std::abs(b1), std::abs(b2));
    out.beta_extrema_ok = b1 >= bmax - tol && b2 <= bmin + tol;
  }
  const double closure = out.samples.back().beta / out.beta0 - 1.0;
  std::ostringstream os;
  os << "beta(T)/beta(0) - 1 = " << closure;
  out.notes.push_back(os.str());
  return out;
}

SemistabilityVerdict semistability_verdict(const CoefficientFamily& fam, const CycleRecord& cycle,
                                           const SemistabilityOptions& opts) {
  const auto zs = check_C1(fam);
  require_c1(zs);
  if (zs.orientation != -1) throw PreconditionError("construction expects A'(0) < 0 < B(0)");
  const auto d = alpha_beta_diagnostics(fam, cycle, opts.alpha_beta);
  if (!d.c2_direct || !d.t1 || !d.t2) throw NumericalError("construction failed: 2Au+B does not have two simple zeros");

  SemistabilityVerdict v;
  v.cycle = cycle;
  v.t1 = *d.t1;
  v.t2 = *d.t2;
  v.c2_direct = d.c2_direct;
  v.c3_direct = d.c3_direct;
  v.orientation = zs.orientation;
  const double T = fam.period();
  const double beta0 = d.beta0;
  auto beta = [&](double t) { return d.beta_at(t); };
  auto alpha = [&](double t) { return d.alpha_at(t).value_or(std::numeric_limits<double>::quiet_NaN()); };

  // Inverse of beta on a monotone branch [a, b]; clamps to the end whose value is closest.
  auto inverse = [&](double target, double a, double b) {
    const double fa = beta(a) - target, fb = beta(b) - target;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) return std::abs(fa) < std::abs(fb) ? a : b;
    return solve_bracketed([&](double t) { return beta(t) - target; }, a, b, fa, fb);
  };

  v.t0 = inverse(beta0, v.t1, v.t2);
  const double a0 = 2.0, aT = alpha(T), at0 = alpha(v.t0);
  std::vector<double> breaks;
  if (at0 > a0 && at0 < aT) {
    v.construction_case = 1;
    v.alpha = at0;
    v.beta = beta0;
    breaks = {v.t0};
  } else {
    const bool left = at0 < a0;
    v.construction_case = left ? 2 : 3;
    const double bext = left ? beta(v.t1) : beta(v.t2);
    double lo1, hi1, lo2, hi2;
    if (left)
      lo1 = 0.0, hi1 = v.t1, lo2 = v.t1, hi2 = v.t0;
    else
      lo1 = v.t0, hi1 = v.t2, lo2 = v.t2, hi2 = T;
    auto dfun = [&](double s) {
      const double b = beta0 + s * (bext - beta0);
      return alpha(inverse(b, lo1, hi1)) - alpha(inverse(b, lo2, hi2));
    };
    const double s_lo = 1e-9, s_hi = 1.0 - 1e-9;
    const double d_lo = dfun(s_lo), d_hi = dfun(s_hi);
    if (!(d_lo > 0.0 && d_hi < 0.0)) {
      std::ostringstream os;
      os << "construction failed: d(beta) from " << d_lo << " to " << d_hi << " in case " << v.construction_case;
      throw NumericalError(os.str());
    }
    const double s = solve_bracketed(dfun, s_lo, s_hi, d_lo, d_hi);
    v.beta = beta0 + s * (bext - beta0);
    const double T1 = inverse(v.beta, lo1, hi1), T2 = inverse(v.beta, lo2, hi2);
    v.alpha = alpha(T1);
    breaks = {T1, T2};
  }

  auto integrand = [&](double t) {
    const auto s = d.trajectory.at(t);
    const auto j = fam.jet(t);
    const double F = (2.0 - v.alpha) * j.B + 2.0 * (3.0 - v.alpha) * j.A * s[0];
    const double G = s[1] - v.beta * s[0];
    return F * G;
  };
  std::vector<double> knots{0.0};
  for (double b : breaks) knots.push_back(b);
  knots.push_back(T);
  std::sort(knots.begin(), knots.end());
  v.integral = 0.0;
  v.integral_error = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i]) continue;
    double err = 0.0;
    v.integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, knots[i], knots[i + 1], 15,
                                                                                 1e-13, &err);
    v.integral_error += err;
  }
  const double accept = std::max(10.0 * opts.quadrature_tol, 10.0 * v.integral_error);
  v.integral_sign = std::abs(v.integral) > accept ? (v.integral > 0 ? 1 : -1) : 0;

  IntegratorOptions io = opts.alpha_beta.integrator;
  const double uxx = integrate_with_variations(fam, cycle.x_star, io).uxx_T;
  const double uxx_tol = 10.0 * std::max(io.abs_tol, io.rel_tol);
  v.uxx_sign = std::abs(uxx) > uxx_tol ? (uxx > 0 ? 1 : -1) : 0;

  double pos = 0.0, mag = 0.0;
  for (const auto& s : d.samples) {
    const double fg = integrand(s.t);
    pos = std::max(pos, fg);
    mag = std::max(mag, std::abs(fg));
  }
  v.fg_positive_part = mag > 0.0 ? pos / mag : 0.0;
  v.consistent = v.integral_sign != 0 && v.integral_sign == v.uxx_sign && v.uxx_sign == v.orientation;
  return v;
}

}  // namespace abel
