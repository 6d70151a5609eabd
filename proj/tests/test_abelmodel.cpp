#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "abel/derived.hpp"
#include "abel/realroots.hpp"
#include "abel/structure.hpp"

using namespace abel;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }
constexpr double pi = std::numbers::pi;
}  // namespace

TEST_CASE("family evaluation and canonical form") {
  const QuadPoly qp(q(2, 3), q(1, 3));
  const auto j = qp.jet(q(1, 2));
  CHECK(j.A == q(-1, 12));
  CHECK(j.B == q(-1, 12));
  CHECK(j.dA == q(1, 3));
  CHECK(j.dB == q(-1, 3));

  const LinTrig lt(0.3, 0.2, -0.4, 0.5);
  const auto j0 = lt.jet(0.0);
  CHECK(j0.A == doctest::Approx(0.0));
  CHECK(j0.dA == doctest::Approx(-1.0));
  CHECK(j0.B == doctest::Approx(0.7));
  CHECK_THROWS_AS(LinTrig(0, -1, 0, 0.5), PreconditionError);

  // Closed-form derivatives agree with central differences.
  for (double t : {0.3, 1.7, 4.1}) {
    const double h = 1e-5;
    const auto jm = lt.jet(t - h), jp = lt.jet(t + h), jt = lt.jet(t);
    CHECK(jt.dA == doctest::Approx((jp.A - jm.A) / (2 * h)).epsilon(1e-8));
    CHECK(jt.ddB == doctest::Approx((jp.dB - jm.dB) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("QuadPoly certificate polynomials") {
  const auto f = quad_poly_forms(QuadPoly(q(2, 3), q(1, 3)));
  CHECK(f.Q == RatPoly{q(2, 3), q(-8, 3), q(38, 9), q(-8, 3)});
  CHECK(f.P.degree() == 6);
  CHECK(f.Q(q(1, 3)) == q(4, 27));
  CHECK(f.Q(q(1)) == q(-4, 9));
}

TEST_CASE("printed Q cubic matches the definition on a rational grid") {
  for (int i = 1; i < 25; ++i) {
    for (int j = 1; j < i; ++j) {
      const Rational ta = q(i, 25), tb = q(j, 25);
      const RatPoly printed{tb * (3 * ta * (tb + 1) - 2 * tb), -2 * tb * (tb + 4 * ta + 1),
                            (tb * tb + 12 * tb + 1) - (1 + tb) * ta, -4 * (1 - ta + tb)};
      CHECK(quad_poly_forms(QuadPoly(ta, tb)).Q == printed);
    }
  }
}

TEST_CASE("polynomial forms agree with pointwise evaluation") {
  const QuadPoly qp(q(3, 5), q(1, 7));
  const auto f = quad_poly_forms(qp);
  for (int k = 0; k <= 10; ++k) {
    const Rational t = q(k, 10);
    const auto j = qp.jet(t);
    CHECK(f.P(t) == certificate_P(j));
    CHECK(f.Q(t) == certificate_Q(j));
    CHECK(f.cross(t) == cross_term(j));
  }
}

TEST_CASE("v at x = 0 and at the period endpoints") {
  const QuadPoly qp(q(2, 3), q(1, 3));
  CHECK(certificate_v(qp.jet(q(0)), q(0)) == q(-8, 9));
  for (int k = 0; k < 5; ++k) {
    const Rational x = q(k * k, 3);
    CHECK(certificate_v(qp.jet(q(0)), x) == -4 * q(2, 3) * q(1, 3));
    CHECK(certificate_v(qp.jet(q(1)), x) == -4 * (1 - q(2, 3)) * (1 - q(1, 3)));
  }
  const auto d = derived_functions(LinTrig(0.1, 0.2, 0.3, 0.4));
  for (double t : {0.0, 1.0, 2.5, 5.0}) {
    const auto j = d.family().jet(t);
    CHECK(d.v(t, 0.0) == doctest::Approx(4 * (j.dA * j.B - j.A * j.dB)));
  }
}

TEST_CASE("phi sign pattern and pole") {
  const auto d = derived_functions(QuadPoly(q(2, 3), q(1, 3)));
  REQUIRE(d.phi(0.2).has_value());
  CHECK(*d.phi(0.2) == doctest::Approx(4.0 / 7));
  CHECK(*d.phi(0.5) == doctest::Approx(-0.5));
  CHECK_FALSE(d.phi(0.0).has_value());
  CHECK_FALSE(d.phi(2.0 / 3.0).has_value());
}

TEST_CASE("cross term is negative for 0 < tB < tA < 1") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> u(1, 99);
  for (int trial = 0; trial < 200; ++trial) {
    int a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a < b) std::swap(a, b);
    const auto f = quad_poly_forms(QuadPoly(q(a, 100), q(b, 100)));
    for (int k = 0; k <= 20; ++k) CHECK(f.cross(q(k, 20)) < 0);
    // Discriminant is 4 tB (tA - 1)(tA - tB).
    const Rational ta = q(a, 100), tb = q(b, 100);
    CHECK(discriminant(f.cross) == 4 * tb * (ta - 1) * (ta - tb));
  }
}

TEST_CASE("Q elimination identity") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> u(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const QuadPoly qp(q(u(rng), 37), q(u(rng), 41));
    const auto j = qp.jet(q(u(rng), 23));
    const Rational x = make_rational(u(rng), 13);
    const Rational lhs = 16 * certificate_Q(j);
    const Rational rhs = 4 * (2 * j.A * j.B * x * x + j.B * j.B * x + 3 * j.dB) * certificate_v(j, x) -
                         4 * j.B * certificate_v_dot(j, x);
    CHECK(lhs == rhs);
  }
  std::uniform_real_distribution<double> r(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const LinTrig lt(r(rng), std::abs(r(rng)) + 0.5, r(rng), r(rng) * 0.2);
    const auto j = lt.jet(std::abs(r(rng)) * pi);
    const double x = std::abs(r(rng)) * 3;
    const double lhs = 16 * certificate_Q(j);
    const double rhs = 4 * (2 * j.A * j.B * x * x + j.B * j.B * x + 3 * j.dB) * certificate_v(j, x) -
                       4 * j.B * certificate_v_dot(j, x);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("check_C1") {
  const auto z = check_C1(QuadPoly(q(2, 3), q(1, 3)));
  CHECK(z.interleaved);
  REQUIRE(z.zeros_A.size() == 2);
  REQUIRE(z.zeros_B.size() == 2);
  CHECK(*z.exact_t_A == q(2, 3));
  CHECK(*z.exact_t_B1 == q(1, 3));
  CHECK(*z.exact_t_B2 == q(1));
  CHECK(z.orientation == -1);

  const auto bad = check_C1(QuadPoly(q(6, 5), q(1, 2)));
  CHECK_FALSE(bad.interleaved);
  CHECK(bad.zeros_A.size() == 1);
  CHECK_FALSE(bad.diagnostic.empty());

  const auto dbl = check_C1(QuadPoly(q(1, 2), q(1)));
  CHECK_FALSE(dbl.interleaved);
  CHECK(dbl.diagnostic.find("non-simple") != std::string::npos);

  const auto lt = check_C1(LinTrig(0, 0, 0, 1));
  CHECK(lt.interleaved);
  REQUIRE(lt.zeros_A.size() == 2);
  CHECK(lt.zeros_A[0].location == 0.0);
  CHECK(lt.zeros_A[1].location == doctest::Approx(pi));
  REQUIRE(lt.zeros_B.size() == 2);
  CHECK(lt.zeros_B[0].location == doctest::Approx(pi / 2));
  CHECK(lt.zeros_B[1].location == doctest::Approx(3 * pi / 2));
  CHECK(lt.orientation == -1);

  // B = 2 + cos t has no zeros.
  CHECK_FALSE(check_C1(LinTrig(0, 2, 0, 1)).interleaved);
}

TEST_CASE("uniqueness prechecks") {
  const auto a = uniqueness_precheck(QuadPoly(q(3, 10), q(1, 2)));
  CHECK(a.verdict == Uniqueness::AtMostOneByCombination);
  CHECK(*a.exact_combination_discriminant / 16 == q(7, 100));

  CHECK(uniqueness_precheck(QuadPoly(q(6, 5), q(1, 2))).verdict == Uniqueness::AtMostOneBySign);

  const auto c = uniqueness_precheck(QuadPoly(q(2, 3), q(1, 3)));
  CHECK(c.verdict == Uniqueness::Inconclusive);
  CHECK(*c.exact_combination_discriminant / 16 == q(-1, 27));

  // The combination discriminant is 16 tB (tA - 1)(tA - tB) on the whole open triangle.
  for (int i = 1; i < 12; ++i)
    for (int j = 1; j < 12; ++j) {
      const Rational ta = q(i, 12), tb = q(j, 12);
      const auto r = uniqueness_precheck(QuadPoly(ta, tb));
      CHECK(*r.exact_combination_discriminant == 16 * tb * (ta - 1) * (ta - tb));
      CHECK((r.verdict == Uniqueness::AtMostOneByCombination) == (ta <= tb));
    }

  CHECK(uniqueness_precheck(LinTrig(0, 0, 0, 1)).verdict == Uniqueness::Inconclusive);
  CHECK(uniqueness_precheck(LinTrig(0, 2, 0, 1)).verdict == Uniqueness::AtMostOneBySign);
  // Zeros of B both inside (0, pi): no interleaving with A's zeros 0 and pi.
  const auto d = uniqueness_precheck(LinTrig(0, 0.3, -1.0, 0.1));
  CHECK(d.verdict == Uniqueness::AtMostOneByCombination);
}
