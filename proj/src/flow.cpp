#include "abel/flow.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace abel {

void IntegratorOptions::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("integrator tolerances must be positive");
  if (!(x_blowup > 0.0)) throw PreconditionError("blow-up threshold must be positive");
  if (max_steps <= 0) throw PreconditionError("max_steps must be positive");
}

const char* to_string(FlowStatus s) { return s == FlowStatus::Completed ? "Completed" : "BlowUp"; }

std::size_t Trajectory::segment(double t) const {
  const bool forward = samples_.back().t >= samples_.front().t;
  auto it = forward ? std::upper_bound(samples_.begin(), samples_.end(), t,
                                       [](double v, const Sample& s) { return v < s.t; })
                    : std::upper_bound(samples_.begin(), samples_.end(), t,
                                       [](double v, const Sample& s) { return v > s.t; });
  std::size_t i = static_cast<std::size_t>(it - samples_.begin());
  if (i == 0) i = 1;
  if (i >= samples_.size()) i = samples_.size() - 1;
  return i - 1;
}

Trajectory::State Trajectory::at(double t) const {
  if (samples_.size() == 1) return samples_.front().y;
  const Sample& a = samples_[segment(t)];
  const Sample& b = *(&a + 1);
  const double h = b.t - a.t;
  const double s = std::clamp((t - a.t) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  State y{};
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = h00 * a.y[k] + h10 * h * a.dy[k] + h01 * b.y[k] + h11 * h * b.dy[k];
  return y;
}

Trajectory::State Trajectory::derivative_at(double t) const {
  if (samples_.size() == 1) return samples_.front().dy;
  const Sample& a = samples_[segment(t)];
  const Sample& b = *(&a + 1);
  const double h = b.t - a.t;
  const double s = std::clamp((t - a.t) / h, 0.0, 1.0);
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  State d{};
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = (d00 * a.y[k] + d01 * b.y[k]) / h + d10 * a.dy[k] + d11 * b.dy[k];
  return d;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,u,u_x,u_xx\n";
  os.precision(17);
  for (const auto& s : samples_) os << s.t << ',' << s.y[0] << ',' << s.y[1] << ',' << s.y[2] << '\n';
}

namespace {

using State3 = std::array<double, 3>;

struct VariationalSystem {
  const CoefficientFamily* fam;
  void operator()(const State3& y, State3& dy, double t) const {
    const auto j = fam->jet(t);
    const double u = y[0];
    const double fx = (3 * j.A * u + 2 * j.B) * u;
    const double fxx = 6 * j.A * u + 2 * j.B;
    dy[0] = (j.A * u + j.B) * u * u;
    dy[1] = fx * y[1];
    dy[2] = fxx * y[1] * y[1] + fx * y[2];
  }
};

}  // namespace

FlowResult integrate_with_variations(const CoefficientFamily& fam, double x0, const IntegratorOptions& opts) {
  opts.validate();
  if (!(x0 >= 0.0)) throw PreconditionError("initial value must be non-negative");
  const double T = fam.period();
  FlowResult r;
  r.x0 = x0;
  if (x0 >= opts.x_blowup) {
    r.status = FlowStatus::BlowUp;
    r.t_escape = 0.0;
    return r;
  }

  const VariationalSystem sys{&fam};
  State3 y{x0, 1.0, 0.0};
  Trajectory traj;
  // The last two accepted points are kept even without a full trajectory, for escape-time location.
  Trajectory::Sample prev{}, last{};
  auto observe = [&](double t, const State3& s) {
    State3 ds;
    sys(s, ds, t);
    prev = last;
    last = {t, s, ds};
    if (opts.keep_trajectory) traj.push(t, s, ds);
  };
  auto stop = [&](double, const State3& s) { return std::abs(s[0]) > opts.x_blowup; };
  const auto out = detail::drive<3>(sys, y, 0.0, T, opts.abs_tol, opts.rel_tol, opts.max_steps, observe, stop);
  r.steps = out.steps;
  r.u_T = y[0];
  r.ux_T = y[1];
  r.uxx_T = y[2];
  if (out.stopped) {
    r.status = FlowStatus::BlowUp;
    Trajectory seg;
    seg.push(prev.t, prev.y, prev.dy);
    seg.push(last.t, last.y, last.dy);
    double lo = prev.t, hi = last.t;
    for (int k = 0; k < 100 && hi - lo > 1e-15; ++k) {
      const double mid = 0.5 * (lo + hi);
      (std::abs(seg.at(mid)[0]) > opts.x_blowup ? hi : lo) = mid;
    }
    r.t_escape = hi;
  }
  if (opts.keep_trajectory) r.trajectory = std::move(traj);
  return r;
}

Supremum bounded_supremum(const CoefficientFamily& fam, const IntegratorOptions& opts, const SupremumOptions& sopts) {
  if (!(sopts.start > 0.0) || !(sopts.ceiling > sopts.start) || !(sopts.rel_width > 0.0))
    throw PreconditionError("invalid supremum search options");
  IntegratorOptions o = opts;
  o.keep_trajectory = false;
  Supremum s;
  auto bounded = [&](double x) {
    ++s.evaluations;
    return integrate_with_variations(fam, x, o).completed();
  };

  double lo = 0.0, hi = sopts.start;
  while (bounded(hi)) {
    lo = hi;
    if (hi >= sopts.ceiling) {
      s.unbounded = true;
      s.x_esc = std::numeric_limits<double>::infinity();
      s.last_bounded = lo;
      return s;
    }
    hi = std::min(2.0 * hi, sopts.ceiling);
  }
  while (hi - lo > sopts.rel_width * hi) {
    const double mid = 0.5 * (lo + hi);
    (bounded(mid) ? lo : hi) = mid;
  }
  s.x_esc = 0.5 * (lo + hi);
  s.last_bounded = lo;
  return s;
}

}  // namespace abel
