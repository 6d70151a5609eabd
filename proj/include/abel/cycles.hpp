#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abel/flow.hpp"

namespace abel {

enum class CycleClass { StableHyperbolic, UnstableHyperbolic, SemistableCandidate };

const char* to_string(CycleClass c);

/// A positive closed solution located through the return map.
struct CycleRecord {
  double x_star = 0.0;
  double multiplier = 1.0;  ///< u_x(T, x*)
  double uxx = 0.0;         ///< u_xx(T, x*)
  CycleClass classification = CycleClass::StableHyperbolic;
  double refinement_width = 0.0;
  double residual = 0.0;  ///< u(T, x*) - x*
  /// For semistable candidates: |u_xx| exceeded the confirmation threshold.
  bool double_confirmed = false;
};

struct CycleSearchOptions {
  int n_grid = 512;
  /// The grid starts at x_max * x_min_ratio.
  double x_min_ratio = 1e-6;
  double semistable_band = 1e-4;
  double uxx_confirm = 1e-6;
  /// Relative size |u(T,x) - x| / x under which a displacement extremum is treated as a tangency.
  double tangency_tol = 1e-4;
  /// Relative bracket width at which bisection stops.
  double bisect_width = 1e-12;
  /// |u(T,x) - x| at or below noise_factor * (rel_tol * x + abs_tol) has no trusted sign.
  double noise_factor = 100.0;
  IntegratorOptions integrator{};
};

struct CycleSearch {
  std::vector<CycleRecord> cycles;
  std::vector<std::string> warnings;
  double x_max = 0.0;
};

CycleClass classify_multiplier(double multiplier, double band);

/// Scans the displacement u(T,x) - x on a log grid over (0, x_max], refines every sign change
/// between grid points whose displacement clears the noise floor, and every displacement
/// extremum (u_x = 1) that nearly touches zero.
/// Requires x_max to lie below the escape supremum and n_grid >= 16.
CycleSearch find_closed_solutions(const CoefficientFamily& fam, double x_max, const CycleSearchOptions& opts = {});

/// Upper end of the search range: just below the escape value when solutions escape,
/// otherwise slightly above u(T, ceiling), which bounds every closed solution.
double default_search_limit(const CoefficientFamily& fam, const IntegratorOptions& opts = {});

/// find_closed_solutions over (0, default_search_limit].
CycleSearch find_closed_solutions(const CoefficientFamily& fam, const CycleSearchOptions& opts = {});

/// Return map u(T,x) = x + c2 x^2 + c3 x^3 + c4 x^4 + O(x^5).
struct HopfCoefficients {
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// Iterated integrals c2 = u2(T), c3 = u3(T), c4 = u4(T) of the series recursion
/// u2' = B, u3' = A + 2 B u2, u4' = 3 A u2 + B (u2^2 + 2 u3), integrated numerically.
HopfCoefficients hopf_coefficients(const CoefficientFamily& fam);

struct ExactHopfCoefficients {
  Rational c2, c3, c4;
};

/// The same recursion carried out by exact polynomial integration.
ExactHopfCoefficients hopf_coefficients_exact(const QuadPoly& q);

struct HopfFitOptions {
  double x_lo = 2e-3;
  double x_hi = 4e-2;
  int samples = 12;
  IntegratorOptions integrator{1e-14, 1e-20, 1e6, 2000000, false};
};

struct HopfFit {
  HopfCoefficients coefficients;
  double c5 = 0.0;
  double residual_norm = 0.0;
};

/// Least-squares fit of u(T,x) - x against {x^2, x^3, x^4, x^5} on log-spaced small x.
HopfFit fit_hopf_coefficients(const CoefficientFamily& fam, const HopfFitOptions& opts = {});

/// A one-parameter family that is monotone in lambda: the vector field grows
/// (direction +1) or shrinks (direction -1) with lambda for x > 0.
enum class MonotoneParameter { NegTA, NegTB, A0, B0 };

const char* to_string(MonotoneParameter p);

class FamilyTemplate {
 public:
  FamilyTemplate(CoefficientFamily base, MonotoneParameter parameter);

  CoefficientFamily at(double lambda) const;
  /// Current value of the parameter on the base family.
  double base_value() const;
  /// +1 if the vector field is increasing in lambda, -1 if decreasing.
  int direction() const;
  MonotoneParameter parameter() const { return param_; }
  const CoefficientFamily& base() const { return base_; }

 private:
  CoefficientFamily base_;
  MonotoneParameter param_;
};

struct LambdaSample {
  double x = 0.0;
  /// Empty when the displacement keeps one sign across the lambda range.
  std::optional<double> lambda;
  /// u_x(T, x, Lambda(x)) when lambda is present.
  std::optional<double> multiplier;
};

struct LambdaOptions {
  double lambda_tol = 1e-11;
  /// Number of lambda values probed for the monotonicity check.
  int monotonicity_probes = 5;
  IntegratorOptions integrator{};
};

/// Solves u(T, x, lambda) = x for one x by monotone bisection.
/// Throws NumericalError("monotonicity assumption violated") when the probes contradict monotonicity.
LambdaSample lambda_at(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi, double x,
                       const LambdaOptions& opts = {});

std::vector<LambdaSample> lambda_curve(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi,
                                       const std::vector<double>& x_grid, const LambdaOptions& opts = {});

/// Number of crossings of the level lambda by the sampled curve.
int count_level_crossings(const std::vector<LambdaSample>& curve, double lambda);

struct FoldPoint {
  double x = 0.0;
  double lambda = 0.0;
  double multiplier = 1.0;
  double uxx = 0.0;
};

/// Extremum of Lambda on [x_lo, x_hi], located where u_x(T, x, Lambda(x)) = 1.
/// Requires 1 - u_x to take opposite signs at the two ends.
FoldPoint locate_fold(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi, double x_lo, double x_hi,
                      const LambdaOptions& opts = {});

}  // namespace abel
