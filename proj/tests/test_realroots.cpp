#include <doctest.h>

#include <algorithm>
#include <random>

#include "abel/derived.hpp"
#include "abel/realroots.hpp"

using namespace abel;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

RatPoly from_roots(const std::vector<Rational>& roots, const Rational& lead = 1) {
  RatPoly p = RatPoly::constant(lead);
  for (const auto& r : roots) p = p * RatPoly::linear_factor(r);
  return p;
}

// Sign changes of p on a uniform grid over [lo, hi], doubling the grid until the count is stable.
int sampled_root_count(const RatPoly& p, double lo, double hi) {
  int previous = -1;
  for (int n = 10000;; n *= 2) {
    int count = 0;
    int last = sign(p(lo));
    for (int i = 1; i <= n; ++i) {
      const int s = sign(p(lo + (hi - lo) * i / n));
      if (s != 0 && last != 0 && s != last) ++count;
      if (s != 0) last = s;
    }
    if (count == previous || n > 200000) return count;
    previous = count;
  }
}

}  // namespace

TEST_CASE("signed remainder sequence on small examples") {
  auto s = signed_remainder_sequence(RatPoly{q(-1), q(0), q(1)}, RatPoly{q(0), q(2)});
  REQUIRE(s.size() == 3);
  CHECK(s[2] == RatPoly{q(1)});

  s = signed_remainder_sequence(RatPoly{q(1), q(0), q(1)}, RatPoly{q(0), q(2)});
  REQUIRE(s.size() == 3);
  CHECK(s[2] == RatPoly{q(-1)});

  CHECK_THROWS_WITH_AS(signed_remainder_sequence(RatPoly{}, RatPoly{q(1)}), "undefined sequence", PreconditionError);
}

TEST_CASE("Sturm sequence of the quadratic-family Q at (2/3, 1/3)") {
  const auto forms = quad_poly_forms(QuadPoly(q(2, 3), q(1, 3)));
  const auto s = sturm_sequence(forms.Q);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == RatPoly{q(2, 3), q(-8, 3), q(38, 9), q(-8, 3)});
  CHECK(s[2] == RatPoly{q(-16, 81), q(71, 243)});
  CHECK(s[3] == RatPoly{q(3096, 5041)});
}

TEST_CASE("last Sturm element of Q matches the closed form and is positive") {
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; j < i; ++j) {
      const Rational ta = q(i, 20), tb = q(j, 20);
      const auto s = sturm_sequence(quad_poly_forms(QuadPoly(ta, tb)).Q);
      REQUIRE(s.size() == 4);
      REQUIRE(s[3].degree() == 0);
      const Rational f = 3 * tb * tb * tb * tb - 6 * ta * tb * tb * tb + 3 * ta * ta * tb * tb + 506 * ta * tb * tb -
                         506 * tb * tb - 506 * ta * ta * tb + 506 * ta * tb + 3 * ta * ta - 6 * ta + 3;
      const Rational g = tb * tb * tb * tb - 2 * ta * tb * tb * tb + ta * ta * tb * tb - 98 * ta * tb * tb +
                         98 * tb * tb + 98 * ta * ta * tb - 98 * ta * tb + ta * ta - 2 * ta + 1;
      const Rational expected = 36 * (1 - ta) * (1 - tb) * (1 - tb) * tb * (ta - tb) * (1 - ta + tb) * f / (g * g);
      CHECK(s[3].coefficient(0) == expected);
      CHECK(expected > 0);
    }
  }
}

TEST_CASE("sturm_count examples") {
  const auto forms = quad_poly_forms(QuadPoly(q(2, 3), q(1, 3)));
  CHECK(forms.Q(q(1, 3)) == q(4, 27));
  CHECK(forms.Q(q(1)) == q(-4, 9));
  CHECK(sturm_count(forms.Q, Interval(q(1, 3), q(1))) == 1);
  CHECK(sturm_count(RatPoly{q(1), q(0), q(1)}, Interval(q(-10), q(10))) == 0);
  CHECK_THROWS_WITH_AS(sturm_count(RatPoly{q(-1), q(1)}, Interval(q(0), q(1))),
                       "endpoint is a root; perturb interval", PreconditionError);
}

TEST_CASE("Budan-Fourier examples") {
  CHECK(budan_fourier_bound(RatPoly{q(2), q(-3), q(1)}, Interval(q(0), q(3))) == 2);
  CHECK(budan_fourier_bound(RatPoly{q(5)}, Interval(q(0), q(3))) == 0);
  const Rational ta = q(2, 3), tb = q(1, 3);
  const auto Q = quad_poly_forms(QuadPoly(ta, tb)).Q;
  const auto der = derivative_list(Q);
  CHECK(SignSequence::at(der, q(0)).values == std::vector<int>{1, -1, 1, -1});
  CHECK(budan_fourier_bound(Q, Interval(q(0), tb)) == 0);
}

TEST_CASE("discriminant and resultant") {
  // x^2 + b x + c
  CHECK(discriminant(RatPoly{q(3), q(5), q(1)}) == q(25 - 12));
  CHECK(discriminant(RatPoly{q(1, 2), q(-7, 3), q(1)}) == q(49, 9) - 2);
  CHECK(discriminant(from_roots({q(1), q(1), q(2)})) == 0);
  CHECK_THROWS_AS(discriminant(RatPoly{q(4)}), PreconditionError);
  // Res(x - a, x - b) = a - b up to orientation: Res(p, q) = prod q(roots of p) for monic p.
  CHECK(resultant(RatPoly::linear_factor(q(2)), RatPoly{q(-5), q(1)}) == q(-3));
}

TEST_CASE("isolate_real_roots") {
  const auto ivs = isolate_real_roots(from_roots({q(1), q(2), q(3)}));
  REQUIRE(ivs.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(ivs[k].contains(q(k + 1)));
  CHECK(isolate_real_roots(RatPoly{q(-3), q(0), q(-15), q(0), q(-9), q(0), q(-5)}).empty());
  // Repeated roots are reported once.
  CHECK(isolate_real_roots(from_roots({q(1, 2), q(1, 2), q(-4)})).size() == 2);
}

TEST_CASE("refine_root and sign_at_root") {
  const RatPoly p{q(-2), q(0), q(1)};  // roots +-sqrt 2
  const auto ivs = isolate_real_roots(p);
  REQUIRE(ivs.size() == 2);
  const auto r = refine_root(p, ivs[1], make_rational(1, 1000000));
  CHECK(r.width() <= make_rational(1, 1000000));
  CHECK(std::abs(r.approx_midpoint() - std::sqrt(2.0)) < 1e-6);
  CHECK(sign_at_root(RatPoly{q(-7, 5), q(1)}, p, ivs[1]) == 1);
  CHECK(sign_at_root(RatPoly{q(-3, 2), q(1)}, p, ivs[1]) == -1);
  CHECK(sign_at_root(RatPoly{q(-2), q(0), q(1)}, p, ivs[0]) == 0);
}

TEST_CASE("property: Sturm count equals sampling oracle on random rational-root polynomials") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> num(-60, 60), deg(1, 5);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Rational> roots;
    const int n = deg(rng);
    while (static_cast<int>(roots.size()) < n) {
      const Rational r = make_rational(num(rng), 7);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    const RatPoly p = from_roots(roots, q(num(rng) == 0 ? 1 : 3));
    const Rational lo = make_rational(2 * num(rng) + 1, 14), hi = lo + make_rational(std::abs(num(rng)) + 1, 5);
    const int exact = sturm_count(p, Interval(lo, hi));
    CHECK(exact == sampled_root_count(p, to_double(lo), to_double(hi)));
    const int bound = budan_fourier_bound(p, Interval(lo, hi));
    CHECK(bound >= exact);
    CHECK((bound - exact) % 2 == 0);
  }
}

TEST_CASE("property: discriminant vanishes exactly when gcd(p, p') is nontrivial") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> c(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> coeffs;
    for (int k = 0; k < 4; ++k) coeffs.emplace_back(c(rng));
    coeffs.emplace_back(c(rng) == 0 ? 1 : c(rng) | 1);
    const RatPoly p(coeffs);
    if (p.degree() < 1) continue;
    CHECK((discriminant(p) == 0) == (gcd(p, p.derivative()).degree() >= 1));
  }
}

TEST_CASE("exact arithmetic is deterministic") {
  const auto a = sturm_sequence(quad_poly_forms(QuadPoly(q(5, 7), q(2, 9))).Q);
  const auto b = sturm_sequence(quad_poly_forms(QuadPoly(q(5, 7), q(2, 9))).Q);
  CHECK(a == b);
}
