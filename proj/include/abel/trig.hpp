#pragma once

#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "abel/flow.hpp"
#include "abel/structure.hpp"

namespace abel {

/// A(t) = a1 + a2 sin t + a3 cos t, B(t) = b1 + b2 sin t + b3 cos t on [0, 2 pi].
struct GeneralTrig {
  double a1 = 0, a2 = 0, a3 = 0;
  double b1 = 0, b2 = 0, b3 = 0;
};

struct Normalization {
  std::optional<LinTrig> family;
  /// The zero of A moved to t = 0.
  double shift = 0.0;
  bool time_reversed = false;
  /// c with y = c x; the new coefficients are A/c^2 and B/c.
  double scale = 1.0;
  std::string note;
};

/// Canonical form with A(0) = 0, A'(0) = -1, B(0) > 0. When A has no zeros the family is empty
/// and the note says so. Throws PreconditionError when every zero of A is non-simple or B vanishes
/// at the chosen zero of A.
Normalization normalize(const GeneralTrig& g);

/// Half-angle form z = tan((t - pi)/2): A = Abar(z)/(z^2+1), B = Bbar(z)/(z^2+1).
struct RationalCoeffPair {
  RatPoly Abar;  ///< 2 (z + a0)
  RatPoly Bbar;  ///< (b0 + b2) z^2 - 2 b1 z + b0 - b2
  std::vector<double> zeros_A, zeros_B;
};

RationalCoeffPair half_angle_pair(const LinTrig& l);

/// (z^2 + 1)^3 Pbar(z), built from the half-angle numerators.
RatPoly pbar_numerator(const RationalCoeffPair& pair);

/// The sextic p(z) at (b2, zB) from its expanded coefficient formula.
RatPoly p_poly(const Rational& b2, const Rational& zB);

/// The closed-form discriminant expression at (b2, zB).
Rational delta_expression(const Rational& b2, const Rational& zB);

enum class C2Region { QNegative, B2Large, Other };

const char* to_string(C2Region r);

struct QRegion {
  double q = 0.0;
  int q_sign = 0;  ///< exact sign for the binary values of b1, b2
  C2Region region = C2Region::Other;
  Rational zB;     ///< rational approximation of zB+ (exact when the square root is rational)
  RatPoly p;
  int delta_sign = 0;  ///< sign of the discriminant of p
  int real_roots = 0;
};

/// Throws PreconditionError for b2 <= 0.
QRegion q_and_region(double b1, double b2);

struct NoC3Witness {
  bool degenerate = false;
  double t = 0.0;
  double x = 0.0;
  double v_residual = 0.0;
  double vdot_residual = 0.0;
};

/// A point with v = vdot = 0 and x > 0 for the family with a0 = b0 = 0. Requires b2 > 0.
/// Returns degenerate when sin(2 t_i) vanishes or no candidate passes the residual check.
NoC3Witness noC3_witness(double b1, double b2);

enum class EquilibriumType { Saddle, UnstableNodeFocus, StableNodeFocus, Degenerate };

const char* to_string(EquilibriumType e);

struct Equilibrium {
  double t = 0.0;
  EquilibriumType type = EquilibriumType::Degenerate;
  double trace = 0.0, det = 0.0;
};

struct ManifoldSample {
  double t, y;
};

struct ManifoldBranch {
  std::vector<ManifoldSample> samples;
  /// y at the section t = pi, after Richardson extrapolation in the launch offset.
  std::optional<double> y_at_section;
  bool unbounded = false;
  std::string note;
};

struct DecayEstimate {
  double x_start = 0.0;       ///< u_inf(2 pi)
  long periods_direct = 0;    ///< return-map iterations carried out one by one
  double periods_accelerated = 0.0;  ///< periods estimated by integrating dx / (x - P(x))
  double x_switch = 0.0;
  double target = 1e-3;
  bool reached = false;
  double total_periods() const { return double(periods_direct) + periods_accelerated; }
};

struct InfinityOptions {
  double launch_offset = 1e-8;
  double match_tol = 1e-6;
  double y_escape = 1e6;
  double decay_target = 1e-3;
  double decay_switch = 0.05;
  long decay_direct_max = 200000;
  IntegratorOptions integrator{1e-12, 1e-14, 1e6, 2000000, false};
};

struct InfinityReport {
  std::vector<Equilibrium> equilibria;
  double lambda_minus = 0.0, lambda_plus = 0.0;
  /// The same eigenvalues from a numerical 2x2 eigensolver.
  double lambda_minus_check = 0.0, lambda_plus_check = 0.0;
  ManifoldBranch unstable;  ///< v_inf, launched from (0, 0)
  ManifoldBranch stable;    ///< w_inf, launched backwards from (2 pi, 0)
  bool connection = false;
  std::optional<double> mismatch;
  std::optional<int> homoclinic_stability_sign;
  std::optional<DecayEstimate> decay;
  /// (x, u(2 pi, x)) on 20 log-spaced x in [1e-2, 1e2], bounded solutions only.
  std::vector<std::pair<double, double>> return_map;
  std::vector<std::string> notes;
};

InfinityReport infinity_analysis(const LinTrig& fam, const InfinityOptions& opts = {});

/// Number of periods for u_inf to fall below opts.decay_target, starting from x0 = u_inf(2 pi).
DecayEstimate decay_of_infinity(const LinTrig& fam, double x0, const InfinityOptions& opts = {});

/// Sign of v_inf(pi) - w_inf(pi), or nothing when a branch does not reach the section.
std::optional<double> manifold_mismatch(const LinTrig& fam, const InfinityOptions& opts = {});

struct ConnectionScan {
  std::optional<double> b0;
  std::optional<int> homoclinic_stability_sign;
  int expected_sign = 0;  ///< -sgn(b0 + b2)
  std::vector<std::pair<double, std::optional<double>>> mismatches;
};

/// 1-D scan in b0 for a parameter where the manifolds connect, refined by bisection.
ConnectionScan scan_connection_b0(double a0, double b1, double b2, double b0_lo, double b0_hi, int steps,
                                  const InfinityOptions& opts = {});

}  // namespace abel
