#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "abel/family.hpp"

namespace abel {

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  /// |u| beyond this value counts as blow-up.
  double x_blowup = 1e6;
  long max_steps = 200000;
  /// Record every accepted step for dense output.
  bool keep_trajectory = false;

  /// Throws PreconditionError when a field is out of range.
  void validate() const;
};

enum class FlowStatus { Completed, BlowUp };

const char* to_string(FlowStatus s);

/// Accepted steps of an integration with cubic Hermite interpolation between them.
class Trajectory {
 public:
  using State = std::array<double, 3>;

  struct Sample {
    double t;
    State y;   ///< (u, u_x, u_xx)
    State dy;  ///< time derivative of y
  };

  void push(double t, const State& y, const State& dy) { samples_.push_back({t, y, dy}); }
  const std::vector<Sample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  /// Interpolated state; t is clamped to the recorded range.
  State at(double t) const;
  /// Interpolated time derivative of the state.
  State derivative_at(double t) const;

  /// Header "t,u,u_x,u_xx", one row per accepted step.
  void write_csv(std::ostream& os) const;

 private:
  std::size_t segment(double t) const;
  std::vector<Sample> samples_;
};

struct FlowResult {
  double x0 = 0.0;
  double u_T = 0.0;
  double ux_T = 1.0;
  double uxx_T = 0.0;
  FlowStatus status = FlowStatus::Completed;
  std::optional<double> t_escape;
  long steps = 0;
  std::optional<Trajectory> trajectory;

  bool completed() const { return status == FlowStatus::Completed; }
  double displacement() const { return u_T - x0; }
};

/// Integrates (u, u_x, u_xx) from (x0, 1, 0) over one period.
/// Throws PreconditionError for x0 < 0 and NumericalError("stiffness/tolerance failure")
/// when the step budget runs out.
FlowResult integrate_with_variations(const CoefficientFamily& fam, double x0, const IntegratorOptions& opts = {});

struct SupremumOptions {
  double start = 1.0;
  double ceiling = 1e4;
  double rel_width = 1e-8;
};

struct Supremum {
  double x_esc = 0.0;
  /// No blow-up found below the ceiling; x_esc is +infinity.
  bool unbounded = false;
  /// Largest tested initial value known to stay bounded.
  double last_bounded = 0.0;
  int evaluations = 0;
};

/// sup{x0 >= 0 : the solution from x0 stays bounded on [0, T]} by exponential search and bisection.
Supremum bounded_supremum(const CoefficientFamily& fam, const IntegratorOptions& opts = {},
                          const SupremumOptions& sopts = {});

namespace detail {

struct DriveOutcome {
  double t = 0.0;
  long steps = 0;
  bool stopped = false;
};

/// Adaptive Dormand-Prince integration of y' = sys(y, t) from t0 to t1 (either direction).
/// `observe(t, y)` runs at t0 and after every accepted step; `stop(t, y)` ends the run early
/// when it returns true. Non-finite trial states are rejected and retried with a smaller step.
template <std::size_t N, class System, class Observer, class Stop>
DriveOutcome drive(System&& sys, std::array<double, N>& y, double t0, double t1, double abs_tol, double rel_tol,
                   long max_steps, Observer&& observe, Stop&& stop) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, N>;
  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  double dt = dir * std::max(std::abs(t1 - t0) * 1e-3, 1e-12);
  DriveOutcome out;
  observe(t, static_cast<const State&>(y));
  long attempts = 0;
  while (dir * (t1 - t) > 0.0) {
    if (out.steps >= max_steps || attempts > 20 * max_steps)
      throw NumericalError("stiffness/tolerance failure");
    ++attempts;
    if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
    const State saved = y;
    const double t_saved = t;
    const double dt_saved = dt;
    const auto res = stepper.try_step(sys, y, t, dt);
    if (res != odeint::success) continue;
    bool finite = true;
    for (double v : y) finite = finite && std::isfinite(v);
    if (!finite) {
      y = saved;
      t = t_saved;
      dt = 0.25 * dt_saved;
      continue;
    }
    // Land exactly on the end point to avoid a sliver step.
    if (std::abs(t1 - t) <= 1e-14 * std::max(1.0, std::abs(t1))) t = t1;
    ++out.steps;
    observe(t, static_cast<const State&>(y));
    if (stop(t, static_cast<const State&>(y))) {
      out.stopped = true;
      break;
    }
  }
  out.t = t;
  return out;
}

}  // namespace detail

}  // namespace abel
