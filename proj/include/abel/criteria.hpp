#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abel/cycles.hpp"
#include "abel/structure.hpp"

namespace abel {

/// Outcome of a sufficient-condition check. Unknown means the certificate neither
/// succeeded nor produced a witness against itself.
enum class Verdict { True, False, Unknown };

const char* to_string(Verdict v);

enum class CertificateMethod { Exact, Numeric };

const char* to_string(CertificateMethod m);

struct C2Report {
  Verdict verdict = Verdict::Unknown;
  std::optional<int> P_zero_count_J1;
  std::optional<int> P_zero_count_J2;
  CertificateMethod method = CertificateMethod::Exact;
  std::vector<std::string> notes;
};

struct QRootInfo {
  double t = 0.0;
  /// Width of the isolating interval (exact route) or of the final bracket (numeric route).
  double width = 0.0;
  /// Signs of A, B, A'B - AB' and P at the root.
  int sign_A = 0, sign_B = 0, sign_cross = 0, sign_P = 0;
  bool positive_v_root = false;
  std::optional<double> x_root;
};

struct C3Report {
  Verdict verdict = Verdict::Unknown;
  CertificateMethod method = CertificateMethod::Exact;
  bool v_t0_negative = false;  ///< v(t, 0) < 0 on [0, T]
  bool v_0x_negative = false;  ///< v(0, x) < 0 for x >= 0
  bool v_Tx_negative = false;  ///< v(T, x) < 0 for x >= 0
  std::vector<QRootInfo> Q_roots;
  std::vector<std::string> notes;
};

struct CriteriaReport {
  ZeroStructure c1;
  C2Report c2;
  C3Report c3;
  std::vector<std::string> notes;
};

/// At most one zero of P in each of J1 = (0, t_B1) and J2 = (t_A, t_B2).
/// Throws PreconditionError when (C1) fails.
C2Report certify_C2(const CoefficientFamily& fam);

/// v(t,0) < 0, v(0,x) < 0, v(T,x) < 0 and no positive zero of v(t,.) at any zero of Q in (0,T).
/// Throws PreconditionError when (C1) fails.
C3Report certify_C3(const CoefficientFamily& fam);

/// (C1) plus both certificates; when (C1) fails the certificates are reported Unknown.
CriteriaReport criteria_report(const CoefficientFamily& fam);

/// True when a x^2 + b x + c < 0 for every x >= 0.
bool negative_on_halfline(const Rational& a, const Rational& b, const Rational& c);
bool negative_on_halfline(double a, double b, double c);

struct AlphaBetaSample {
  double t;
  double u;      ///< closed solution
  double ux;     ///< u_x(t, x*)
  double g;      ///< 2 A u + B
  std::optional<double> alpha;  ///< empty at a zero of g
  double beta;
  double v;      ///< v(t, u(t))
};

struct AlphaBetaOptions {
  int samples = 2001;
  /// Largest |u_x(T,x*) - 1| accepted as near-singular.
  double singular_band = 1e-4;
  IntegratorOptions integrator{1e-13, 1e-15, 1e6, 200000, true};
};

struct AlphaBetaDiagnostics {
  std::optional<CoefficientFamily> family;
  CycleRecord cycle;
  Trajectory trajectory;
  std::vector<AlphaBetaSample> samples;
  /// Zeros of 2 A u + B.
  std::vector<double> g_zeros;
  std::optional<double> t1, t2;
  double beta0 = 0.0;
  bool ordering_ok = false;        ///< 0 < t1 < t_B1 < t_A < t2 < t_B2
  bool alpha_decreasing = false;   ///< on every continuity interval, at the samples
  bool beta_extrema_ok = false;    ///< maximum at t1, minimum at t2
  bool c2_direct = false;          ///< exactly one zero of 2Au+B in [0,t_A] and in [t_A,T]
  bool c3_direct = false;          ///< v(t, u(t)) < 0 at every sample
  std::vector<std::string> notes;

  double beta_at(double t) const;
  /// Empty at a zero of 2 A u + B.
  std::optional<double> alpha_at(double t) const;
  double g_at(double t) const;
};

/// Curves of the α/β construction along a near-singular closed solution.
AlphaBetaDiagnostics alpha_beta_diagnostics(const CoefficientFamily& fam, const CycleRecord& cycle,
                                            const AlphaBetaOptions& opts = {});

struct SemistabilityOptions {
  double quadrature_tol = 1e-10;
  AlphaBetaOptions alpha_beta{};
};

struct SemistabilityVerdict {
  CycleRecord cycle;
  double t1 = 0.0, t2 = 0.0, t0 = 0.0;
  int construction_case = 0;  ///< 1, 2 or 3
  double alpha = 0.0, beta = 0.0;
  double integral = 0.0;
  double integral_error = 0.0;
  int integral_sign = 0;  ///< 0 when indeterminate
  int uxx_sign = 0;
  int orientation = 0;    ///< sgn(A'(0) B(0))
  bool c2_direct = false;
  bool c3_direct = false;
  /// Largest positive value of F G on the sample grid, relative to max |F G|.
  double fg_positive_part = 0.0;
  bool consistent = false;
};

/// Chooses (α, β) so that F(·,α) and G(·,β) change sign together, then compares the sign of
/// ∫ F G with sgn u_xx(T,x*) and sgn(A'(0)B(0)). Throws NumericalError("construction failed")
/// when the bracketing function has no sign change.
SemistabilityVerdict semistability_verdict(const CoefficientFamily& fam, const CycleRecord& cycle,
                                           const SemistabilityOptions& opts = {});

}  // namespace abel
