#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "abel/criteria.hpp"
#include "abel/derived.hpp"
#include "abel/realroots.hpp"

using namespace abel;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }

struct FoldCase {
  CoefficientFamily fam;
  CycleRecord cycle;
};

const FoldCase& fold_case() {
  static const FoldCase fc = [] {
    const FamilyTemplate tmpl(QuadPoly(q(2, 3), q(1, 3) - q(2, 100)), MonotoneParameter::NegTA);
    const auto f = locate_fold(tmpl, -0.7, -0.6, 1.5, 4.0);
    CycleRecord c;
    c.x_star = f.x;
    c.multiplier = f.multiplier;
    c.uxx = f.uxx;
    c.classification = CycleClass::SemistableCandidate;
    c.double_confirmed = std::abs(f.uxx) > 1e-6;
    return FoldCase{tmpl.at(f.lambda), c};
  }();
  return fc;
}
}  // namespace

TEST_CASE("quadratic negativity on the half line") {
  CHECK(negative_on_halfline(q(0), q(0), q(-1)));
  CHECK_FALSE(negative_on_halfline(q(0), q(0), q(0)));
  CHECK_FALSE(negative_on_halfline(q(1), q(-5), q(-1)));
  CHECK(negative_on_halfline(q(-1), q(1), q(-1)));       // discriminant -3
  CHECK_FALSE(negative_on_halfline(q(-1), q(3), q(-1)));  // roots at (3 +- sqrt 5)/2
  CHECK(negative_on_halfline(q(-1), q(-3), q(-1)));
  CHECK_FALSE(negative_on_halfline(q(0), q(1), q(-1)));
  CHECK(negative_on_halfline(-1.0, 1.0, -1.0));
  CHECK_FALSE(negative_on_halfline(-1.0, 3.0, -1.0));
}

TEST_CASE("certificates hold across the quadratic family") {
  for (int a = 2; a < 12; ++a) {
    for (int b = 1; b < a; ++b) {
      const QuadPoly qp(q(a, 12), q(b, 12));
      const auto c2 = certify_C2(qp);
      CHECK(c2.method == CertificateMethod::Exact);
      CHECK(c2.verdict == Verdict::True);
      CHECK(*c2.P_zero_count_J1 == 0);
      CHECK(*c2.P_zero_count_J2 == 0);
      const auto c3 = certify_C3(qp);
      CHECK(c3.verdict == Verdict::True);
      CHECK(c3.v_t0_negative);
      CHECK(c3.v_0x_negative);
      CHECK(c3.v_Tx_negative);
      CHECK(c3.Q_roots.size() == 1);
      for (const auto& r : c3.Q_roots) CHECK_FALSE(r.positive_v_root);
    }
  }
}

TEST_CASE("the zero of Q for the double Hopf parameters") {
  const QuadPoly qp(q(2, 3), q(1, 3));
  const auto c3 = certify_C3(qp);
  REQUIRE(c3.Q_roots.size() == 1);
  const auto& r = c3.Q_roots[0];
  CHECK(r.t > 1.0 / 3);
  CHECK(r.t < 1.0);
  if (r.t > 2.0 / 3) {
    // Discriminant of v(t, .) is -16 A^2 B P there, negative because B < 0 < ... P < 0 makes it negative.
    CHECK(r.sign_B * r.sign_P > 0);
  }
  const auto j = qp.jet(r.t);
  CHECK(std::abs(certificate_Q(j)) < 1e-12);
}

TEST_CASE("certificates require the interleaving condition") {
  const QuadPoly bad(q(1, 4), q(1, 2));  // t_B > t_A
  CHECK_THROWS_AS(certify_C2(bad), PreconditionError);
  CHECK_THROWS_AS(certify_C3(bad), PreconditionError);
  const auto rep = criteria_report(bad);
  CHECK_FALSE(rep.c1.interleaved);
  CHECK(rep.c2.verdict == Verdict::Unknown);
  CHECK(rep.c3.verdict == Verdict::Unknown);
}

TEST_CASE("trigonometric certificates") {
  const auto c2 = certify_C2(LinTrig(0.01, 0.02, 0.0, 1.0));
  CHECK(c2.method == CertificateMethod::Numeric);
  CHECK(c2.verdict == Verdict::True);
  CHECK(*c2.P_zero_count_J1 == 0);
  CHECK(*c2.P_zero_count_J2 == 0);

  const auto c2q = certify_C2(LinTrig(0.0, 0.0, 0.0, 1.0));
  CHECK(c2q.verdict == Verdict::True);

  const auto c3 = certify_C3(LinTrig(0.0, 0.0, 1.0, 1.0));
  CHECK(c3.verdict == Verdict::False);
  CHECK(c3.v_t0_negative);
  bool found = false;
  for (const auto& r : c3.Q_roots)
    if (r.positive_v_root && std::abs(r.t - std::numbers::pi / 4) < 1e-9) {
      found = true;
      CHECK(*r.x_root == doctest::Approx(2.5538).epsilon(1e-4));
    }
  CHECK(found);
}

TEST_CASE("alpha and beta along a fold cycle") {
  const auto& fc = fold_case();
  const auto d = alpha_beta_diagnostics(fc.fam, fc.cycle);
  REQUIRE(d.t1);
  REQUIRE(d.t2);
  CHECK(d.c2_direct);
  CHECK(d.c3_direct);
  CHECK(d.ordering_ok);
  CHECK(d.alpha_decreasing);
  CHECK(d.beta_extrema_ok);

  CHECK(*d.alpha_at(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.beta0 * fc.cycle.x_star == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.beta_at(1.0) == doctest::Approx(d.beta0).epsilon(1e-8));

  // sgn(alpha') = sgn(v(t, u(t))) wherever alpha is continuous between samples.
  const auto& s = d.samples;
  int compared = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!s[i - 1].alpha || !s[i + 1].alpha || s[i - 1].g * s[i + 1].g <= 0.0) continue;
    const double da = *s[i + 1].alpha - *s[i - 1].alpha;
    if (std::abs(s[i].v) < 1e-9) continue;
    CHECK((da < 0) == (s[i].v < 0));
    ++compared;
  }
  CHECK(compared > 1900);

  // beta' = u (2 A u + B) beta, checked against central differences of the interpolant.
  const double h = 1e-3;
  for (double t = 0.05; t < 0.95; t += 0.05) {
    const double fd = (8 * (d.beta_at(t + h) - d.beta_at(t - h)) - (d.beta_at(t + 2 * h) - d.beta_at(t - 2 * h))) / (12 * h);
    const auto st = d.trajectory.at(t);
    const double rhs = st[0] * d.g_at(t) * d.beta_at(t);
    CHECK(std::abs(fd - rhs) <= 1e-6 * std::max(std::abs(rhs), 1e-3));
  }

  // Extrema of beta coincide with t1 and t2. Here beta comes from fresh integrations up to each
  // time, so interpolation error plays no part, and the extremum is the root of a difference quotient.
  auto beta_direct = [&](double t) {
    std::array<double, 2> y{fc.cycle.x_star, 1.0};
    auto rhs = [&](const std::array<double, 2>& s, std::array<double, 2>& ds, double tt) {
      const auto j = fc.fam.jet(tt);
      ds[0] = (j.A * s[0] + j.B) * s[0] * s[0];
      ds[1] = (3 * j.A * s[0] * s[0] + 2 * j.B * s[0]) * s[1];
    };
    detail::drive<2>(rhs, y, 0.0, t, 1e-16, 1e-14, 1000000, [](double, const auto&) {},
                     [](double, const auto&) { return false; });
    return y[1] / y[0];
  };
  auto dbeta = [&](double t) {
    return 8 * (beta_direct(t + h) - beta_direct(t - h)) - (beta_direct(t + 2 * h) - beta_direct(t - 2 * h));
  };
  for (double tz : {*d.t1, *d.t2}) {
    boost::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve(dbeta, tz - 0.01, tz + 0.01,
                                                     boost::math::tools::eps_tolerance<double>(40), it);
    CHECK(std::abs(0.5 * (r.first + r.second) - tz) < 1e-8);
  }
}

TEST_CASE("semistability verdict at a fold") {
  const auto& fc = fold_case();
  const auto v = semistability_verdict(fc.fam, fc.cycle);
  CHECK(v.orientation == -1);
  CHECK(v.integral_sign == -1);
  CHECK(v.uxx_sign == -1);
  CHECK(v.consistent);
  CHECK(v.c2_direct);
  CHECK(v.c3_direct);
  CHECK(std::abs(v.integral) > 10 * 1e-10);
  CHECK(v.fg_positive_part < 1e-6);
  CHECK(v.construction_case >= 1);
  CHECK(v.construction_case <= 3);
  CHECK(v.t1 < v.t0);
  CHECK(v.t0 < v.t2);
}

TEST_CASE("alpha/beta diagnostics refuse hyperbolic cycles") {
  const auto search = find_closed_solutions(QuadPoly(q(2, 3) - q(2, 100), q(1, 3) - q(2, 100)));
  REQUIRE_FALSE(search.cycles.empty());
  CHECK_THROWS_AS(alpha_beta_diagnostics(QuadPoly(q(2, 3) - q(2, 100), q(1, 3) - q(2, 100)), search.cycles[0]),
                  PreconditionError);
}
