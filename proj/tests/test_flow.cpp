#include <doctest.h>

#include <chrono>
#include <random>
#include <sstream>

#include "abel/flow.hpp"

using namespace abel;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }
}  // namespace

TEST_CASE("origin is a closed solution") {
  for (const CoefficientFamily& fam :
       {CoefficientFamily(QuadPoly(q(2, 3), q(1, 3))), CoefficientFamily(LinTrig(0.2, -0.1, 0.3, 1.0))}) {
    const auto r = integrate_with_variations(fam, 0.0);
    CHECK(r.completed());
    CHECK(r.u_T == 0.0);
    CHECK(r.ux_T == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("second variation at the origin is twice the mean of B") {
  for (int i = 1; i < 10; ++i) {
    const Rational tb = q(i, 10);
    const auto r = integrate_with_variations(QuadPoly(q(1, 2), tb), 0.0);
    CHECK(r.uxx_T == doctest::Approx(to_double((3 * tb - 1) / 3)).epsilon(1e-10).scale(1));
  }
  CHECK(std::abs(integrate_with_variations(QuadPoly(q(2, 3), q(1, 3)), 0.0).uxx_T) < 1e-12);
}

TEST_CASE("canonical trig family without constant terms contracts near the origin") {
  for (double b1 : {-1.0, 0.0, 0.7}) {
    for (double x0 : {1e-3, 0.01, 0.05}) {
      const auto r = integrate_with_variations(LinTrig(0, 0, b1, 1.0), x0);
      REQUIRE(r.completed());
      CHECK(r.u_T < x0);
    }
  }
}

TEST_CASE("multiplier is positive") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const CoefficientFamily fam = QuadPoly(q(3, 5), q(1, 4));
  for (int k = 0; k < 20; ++k) {
    const auto r = integrate_with_variations(fam, u(rng));
    if (r.completed()) CHECK(r.ux_T > 0.0);
  }
}

TEST_CASE("variational derivatives agree with finite differences") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> pa(1, 99);
  std::uniform_real_distribution<double> ux(0.05, 2.0);
  int checked = 0;
  while (checked < 30) {
    int a = pa(rng), b = pa(rng);
    if (a == b) continue;
    if (a < b) std::swap(a, b);
    const CoefficientFamily fam = QuadPoly(q(a, 100), q(b, 100));
    const double x = ux(rng), h = 2e-4 * x;
    const auto c = integrate_with_variations(fam, x);
    const auto m = integrate_with_variations(fam, x - h);
    const auto p = integrate_with_variations(fam, x + h);
    const auto m2 = integrate_with_variations(fam, x - 2 * h);
    const auto p2 = integrate_with_variations(fam, x + 2 * h);
    if (!c.completed() || !m2.completed() || !p2.completed()) continue;
    // Fourth-order central differences.
    const double fd1 = (8 * (p.u_T - m.u_T) - (p2.u_T - m2.u_T)) / (12 * h);
    const double fd2 = (8 * (p.ux_T - m.ux_T) - (p2.ux_T - m2.ux_T)) / (12 * h);
    CHECK(std::abs(fd1 - c.ux_T) <= 1e-5 * std::abs(c.ux_T));
    INFO(a, " ", b, " x=", x, " ux=", c.ux_T, " uxx=", c.uxx_T, " fd2=", fd2);
    CHECK(std::abs(fd2 - c.uxx_T) <= 1e-5 * std::max(std::abs(c.uxx_T), std::abs(c.ux_T)));
    ++checked;
  }
}

TEST_CASE("blow-up detection and supremum bracketing") {
  // A > 0 on (0, 1): large solutions escape.
  const CoefficientFamily fam = QuadPoly(q(-1, 2), q(1, 3));
  const auto s = bounded_supremum(fam);
  REQUIRE_FALSE(s.unbounded);
  CHECK(s.x_esc > 0.0);
  CHECK(integrate_with_variations(fam, s.x_esc * (1 - 1e-6)).completed());
  const auto blow = integrate_with_variations(fam, s.x_esc * (1 + 1e-6));
  CHECK_FALSE(blow.completed());
  REQUIRE(blow.t_escape.has_value());
  CHECK(*blow.t_escape > 0.0);
  CHECK(*blow.t_escape <= 1.0);

  // For the interleaved quadratic family even solutions starting near infinity stay bounded.
  CHECK(bounded_supremum(QuadPoly(q(2, 3), q(1, 3))).unbounded);
  CHECK(bounded_supremum(LinTrig(0, 0, 0, 1.0)).unbounded);
}

TEST_CASE("trajectory dense output and CSV") {
  IntegratorOptions o;
  o.keep_trajectory = true;
  const auto r = integrate_with_variations(QuadPoly(q(2, 3), q(1, 3)), 0.5, o);
  REQUIRE(r.trajectory);
  const auto& tr = *r.trajectory;
  CHECK(tr.t_begin() == 0.0);
  CHECK(tr.t_end() == 1.0);
  CHECK(tr.at(0.0)[0] == 0.5);
  CHECK(tr.at(1.0)[0] == r.u_T);
  // Interpolant at a midpoint agrees with a fresh integration stopped there: compare with the ODE derivative.
  const auto mid = tr.at(0.37);
  const auto d = tr.derivative_at(0.37);
  const double A = 0.37 * (0.37 - 2.0 / 3), B = (0.37 - 1.0 / 3) * (0.37 - 1);
  CHECK(d[0] == doctest::Approx((A * mid[0] + B) * mid[0] * mid[0]).epsilon(1e-6));
  std::ostringstream os;
  tr.write_csv(os);
  CHECK(os.str().rfind("t,u,u_x,u_xx\n", 0) == 0);
}

TEST_CASE("option validation and step budget") {
  IntegratorOptions o;
  o.rel_tol = -1;
  CHECK_THROWS_AS(integrate_with_variations(QuadPoly(q(1, 2), q(1, 4)), 0.1, o), PreconditionError);
  CHECK_THROWS_AS(integrate_with_variations(QuadPoly(q(1, 2), q(1, 4)), -0.1), PreconditionError);
  IntegratorOptions tiny;
  tiny.max_steps = 3;
  CHECK_THROWS_WITH_AS(integrate_with_variations(QuadPoly(q(1, 2), q(1, 4)), 0.5, tiny),
                       "stiffness/tolerance failure", NumericalError);
}
