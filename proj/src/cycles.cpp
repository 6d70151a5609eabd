#include "abel/cycles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace abel {

const char* to_string(CycleClass c) {
  switch (c) {
    case CycleClass::StableHyperbolic: return "StableHyperbolic";
    case CycleClass::UnstableHyperbolic: return "UnstableHyperbolic";
    case CycleClass::SemistableCandidate: return "SemistableCandidate";
  }
  return "?";
}

CycleClass classify_multiplier(double multiplier, double band) {
  if (std::abs(multiplier - 1.0) < band) return CycleClass::SemistableCandidate;
  return multiplier < 1.0 ? CycleClass::StableHyperbolic : CycleClass::UnstableHyperbolic;
}

namespace {

struct Eval {
  double x;
  double d;   // u(T,x) - x, +inf after escape
  double g;   // u_x(T,x) - 1
  double uxx;
};

class ReturnMap {
 public:
  ReturnMap(const CoefficientFamily& fam, const IntegratorOptions& o) : fam_(fam), opts_(o) { opts_.keep_trajectory = false; }

  Eval operator()(double x) const {
    const auto r = integrate_with_variations(fam_, x, opts_);
    if (!r.completed()) {
      const double inf = std::numeric_limits<double>::infinity();
      return {x, inf, inf, inf};
    }
    return {x, r.u_T - x, r.ux_T - 1.0, r.uxx_T};
  }

 private:
  const CoefficientFamily& fam_;
  IntegratorOptions opts_;
};

// Bisection on a sign change of `field` of Eval between a and b.
template <class Field>
std::pair<Eval, Eval> bisect(const ReturnMap& map, Eval a, Eval b, Field field, double rel_width) {
  const int sa = sign(field(a));
  while (b.x - a.x > rel_width * b.x) {
    const double mid = 0.5 * (a.x + b.x);
    if (mid <= a.x || mid >= b.x) break;
    const Eval m = map(mid);
    const int sm = sign(field(m));
    if (sm == 0) return {m, m};
    (sm == sa ? a : b) = m;
  }
  return {a, b};
}

CycleRecord make_record(const ReturnMap& map, const Eval& a, const Eval& b, const CycleSearchOptions& o) {
  const Eval c = a.x == b.x ? a : map(0.5 * (a.x + b.x));
  CycleRecord rec;
  rec.x_star = c.x;
  rec.multiplier = c.g + 1.0;
  rec.uxx = c.uxx;
  rec.residual = c.d;
  rec.refinement_width = b.x - a.x;
  rec.classification = classify_multiplier(rec.multiplier, o.semistable_band);
  rec.double_confirmed = rec.classification == CycleClass::SemistableCandidate && std::abs(rec.uxx) > o.uxx_confirm;
  return rec;
}

}  // namespace

CycleSearch find_closed_solutions(const CoefficientFamily& fam, double x_max, const CycleSearchOptions& o) {
  if (o.n_grid < 16) throw PreconditionError("n_grid must be at least 16");
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw PreconditionError("x_max must be positive and finite");
  if (!(o.x_min_ratio > 0.0 && o.x_min_ratio < 1.0)) throw PreconditionError("x_min_ratio must lie in (0, 1)");
  o.integrator.validate();

  CycleSearch out;
  out.x_max = x_max;
  const ReturnMap map(fam, o.integrator);

  std::vector<Eval> grid;
  grid.reserve(o.n_grid);
  for (int i = 0; i < o.n_grid; ++i) {
    const double x = x_max * std::pow(o.x_min_ratio, double(o.n_grid - 1 - i) / (o.n_grid - 1));
    grid.push_back(map(x));
    if (!std::isfinite(grid.back().d)) {
      std::ostringstream w;
      w << "solution escapes from x = " << x << "; scan truncated";
      out.warnings.push_back(w.str());
      break;
    }
  }

  auto dfield = [](const Eval& e) { return e.d; };
  auto gfield = [](const Eval& e) { return e.g; };
  // Displacements and multiplier offsets this small carry no reliable sign.
  const double tol = o.integrator.rel_tol;
  auto d_floor = [&](const Eval& e) { return o.noise_factor * (tol * e.x + o.integrator.abs_tol); };
  auto resolved = [&](const Eval& e) { return std::abs(e.d) > d_floor(e); };
  const double g_floor = o.noise_factor * tol;

  std::optional<Eval> last;  // last grid or extremum point with a resolved displacement sign
  int last_root_cell = -2;
  int unresolved = 0;
  double unresolved_max = 0.0;
  for (const Eval& e : grid)
    if (std::isfinite(e.d) && !resolved(e)) {
      ++unresolved;
      unresolved_max = std::max(unresolved_max, e.x);
    }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const Eval& a = grid[i];
    const Eval& b = grid[i + 1];
    if (i == 0 && resolved(a)) last = a;

    std::vector<Eval> pts;
    std::optional<Eval> extremum;
    if (std::isfinite(b.g) && sign(a.g) * sign(b.g) < 0 && std::abs(a.g) > g_floor && std::abs(b.g) > g_floor) {
      auto [l, r] = bisect(map, a, b, gfield, o.bisect_width);
      extremum = std::abs(l.g) <= std::abs(r.g) ? l : r;
      if (extremum->x > a.x && extremum->x < b.x) pts.push_back(*extremum);
    }
    pts.push_back(b);

    int roots_here = 0;
    for (const Eval& p : pts) {
      if (!resolved(p)) continue;
      if (last && sign(last->d) != sign(p.d)) {
        auto [l, r] = bisect(map, *last, p, dfield, o.bisect_width);
        out.cycles.push_back(make_record(map, l, r, o));
        ++roots_here;
      }
      last = p;
    }
    if (roots_here == 0 && extremum && std::isfinite(extremum->uxx)) {
      const double x = extremum->x;
      const double curvature = std::abs(extremum->uxx) * x * x;
      if (curvature > 2 * d_floor(*extremum) && std::abs(extremum->d) <= o.tangency_tol * curvature) {
        CycleRecord rec = make_record(map, *extremum, *extremum, o);
        out.cycles.push_back(rec);
        ++roots_here;
        std::ostringstream w;
        w << "near-tangency at x = " << x << " with displacement " << extremum->d << " recorded as a double cycle";
        out.warnings.push_back(w.str());
      }
    }
    if (roots_here > 1) {
      std::ostringstream w;
      w << "two closed solutions inside one grid cell near x = " << a.x << "; grid may be too coarse";
      out.warnings.push_back(w.str());
    }
    if (roots_here > 0) {
      if (last_root_cell == static_cast<int>(i) - 1) {
        std::ostringstream w;
        w << "closed solutions in adjacent grid cells near x = " << a.x << "; grid may be too coarse";
        out.warnings.push_back(w.str());
      }
      last_root_cell = static_cast<int>(i);
    }
  }
  if (unresolved > 0) {
    std::ostringstream w;
    w << unresolved << " grid point(s) up to x = " << unresolved_max
      << " have a displacement below the integration noise floor; closed solutions there cannot be resolved";
    out.warnings.push_back(w.str());
  }
  std::sort(out.cycles.begin(), out.cycles.end(), [](auto& l, auto& r) { return l.x_star < r.x_star; });
  return out;
}

double default_search_limit(const CoefficientFamily& fam, const IntegratorOptions& opts) {
  SupremumOptions so;
  const Supremum s = bounded_supremum(fam, opts, so);
  if (!s.unbounded) return s.x_esc * (1.0 - 1e-7);
  IntegratorOptions o = opts;
  o.keep_trajectory = false;
  const auto r = integrate_with_variations(fam, s.last_bounded, o);
  return std::min(so.ceiling, std::max(r.u_T, 0.0) * (1.0 + 1e-3) + 1e-9);
}

CycleSearch find_closed_solutions(const CoefficientFamily& fam, const CycleSearchOptions& opts) {
  return find_closed_solutions(fam, default_search_limit(fam, opts.integrator), opts);
}

HopfCoefficients hopf_coefficients(const CoefficientFamily& fam) {
  using State = std::array<double, 3>;
  auto sys = [&fam](const State& y, State& dy, double t) {
    const auto j = fam.jet(t);
    dy[0] = j.B;
    dy[1] = j.A + 2 * j.B * y[0];
    dy[2] = 3 * j.A * y[0] + j.B * (y[0] * y[0] + 2 * y[1]);
  };
  State y{0.0, 0.0, 0.0};
  detail::drive<3>(sys, y, 0.0, fam.period(), 1e-16, 1e-14, 1000000, [](double, const State&) {},
                   [](double, const State&) { return false; });
  return {y[0], y[1], y[2]};
}

ExactHopfCoefficients hopf_coefficients_exact(const QuadPoly& q) {
  const RatPoly A = q.A_poly(), B = q.B_poly();
  const RatPoly u2 = B.antiderivative();
  const RatPoly u3 = (A + Rational(2) * B * u2).antiderivative();
  const RatPoly u4 = (Rational(3) * A * u2 + B * (u2 * u2 + Rational(2) * u3)).antiderivative();
  const Rational one(1);
  return {u2(one), u3(one), u4(one)};
}

HopfFit fit_hopf_coefficients(const CoefficientFamily& fam, const HopfFitOptions& o) {
  if (!(o.x_lo > 0.0 && o.x_hi > o.x_lo) || o.samples < 4) throw PreconditionError("invalid Hopf fit options");
  const int n = o.samples;
  Eigen::MatrixXd M(n, 4);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double x = o.x_lo * std::pow(o.x_hi / o.x_lo, double(i) / (n - 1));
    const auto r = integrate_with_variations(fam, x, o.integrator);
    if (!r.completed()) throw NumericalError("solution escaped during the series fit");
    // Columns in the scaled variable s = x / x_hi keep the system well conditioned.
    const double s = x / o.x_hi;
    for (int k = 0; k < 4; ++k) M(i, k) = std::pow(s, k + 2);
    rhs(i) = r.u_T - x;
  }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(rhs);
  HopfFit fit;
  auto unscale = [&](int k) { return c(k) / std::pow(o.x_hi, k + 2); };
  fit.coefficients = {unscale(0), unscale(1), unscale(2)};
  fit.c5 = unscale(3);
  fit.residual_norm = (M * c - rhs).norm();
  return fit;
}

const char* to_string(MonotoneParameter p) {
  switch (p) {
    case MonotoneParameter::NegTA: return "-t_A";
    case MonotoneParameter::NegTB: return "-t_B";
    case MonotoneParameter::A0: return "a0";
    case MonotoneParameter::B0: return "b0";
  }
  return "?";
}

FamilyTemplate::FamilyTemplate(CoefficientFamily base, MonotoneParameter parameter)
    : base_(std::move(base)), param_(parameter) {
  const bool quad = base_.kind() == FamilyKind::QuadPoly;
  const bool quad_param = param_ == MonotoneParameter::NegTA || param_ == MonotoneParameter::NegTB;
  if (quad != quad_param) throw PreconditionError("monotone parameter does not belong to the family");
}

CoefficientFamily FamilyTemplate::at(double lambda) const {
  if (const auto* q = base_.quad()) {
    if (param_ == MonotoneParameter::NegTA) return QuadPoly(from_double(-lambda), q->t_B());
    return QuadPoly(q->t_A(), from_double(-lambda));
  }
  const auto* l = base_.trig();
  if (param_ == MonotoneParameter::A0) return LinTrig(lambda, l->b0(), l->b1(), l->b2());
  return LinTrig(l->a0(), lambda, l->b1(), l->b2());
}

double FamilyTemplate::base_value() const {
  switch (param_) {
    case MonotoneParameter::NegTA: return -to_double(base_.quad()->t_A());
    case MonotoneParameter::NegTB: return -to_double(base_.quad()->t_B());
    case MonotoneParameter::A0: return base_.trig()->a0();
    case MonotoneParameter::B0: return base_.trig()->b0();
  }
  return 0.0;
}

// d/dlambda of the vector field: t x^3 for -t_A, -(1 - t) x^2 for -t_B, (1 - cos t) x^3 for a0, x^2 for b0.
int FamilyTemplate::direction() const { return param_ == MonotoneParameter::NegTB ? -1 : 1; }

LambdaSample lambda_at(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi, double x,
                       const LambdaOptions& o) {
  if (!(lambda_hi > lambda_lo)) throw PreconditionError("empty lambda range");
  if (o.monotonicity_probes < 2) throw PreconditionError("at least two monotonicity probes are needed");
  IntegratorOptions io = o.integrator;
  io.keep_trajectory = false;
  const int dir = tmpl.direction();
  auto disp = [&](double lambda) {
    const auto r = integrate_with_variations(tmpl.at(lambda), x, io);
    return r.completed() ? r.u_T - x : std::numeric_limits<double>::infinity();
  };

  const int m = o.monotonicity_probes;
  std::vector<double> ls(m), ds(m);
  for (int k = 0; k < m; ++k) {
    ls[k] = lambda_lo + (lambda_hi - lambda_lo) * k / (m - 1);
    ds[k] = disp(ls[k]);
  }
  for (int k = 0; k + 1 < m; ++k) {
    const double a = dir * ds[k], b = dir * ds[k + 1];
    if (std::isinf(a) || std::isinf(b)) {
      // Escape counts as +infinity displacement, reached at the increasing end only.
      if (std::isinf(ds[k]) && !std::isinf(ds[k + 1]) && dir > 0) throw NumericalError("monotonicity assumption violated");
      if (std::isinf(ds[k + 1]) && !std::isinf(ds[k]) && dir < 0) throw NumericalError("monotonicity assumption violated");
      continue;
    }
    if (b - a < -1e-10 * (1.0 + std::abs(a))) throw NumericalError("monotonicity assumption violated");
  }

  LambdaSample s;
  s.x = x;
  int k = -1;
  for (int i = 0; i + 1 < m; ++i)
    if (sign(ds[i]) * sign(ds[i + 1]) <= 0 && !(ds[i] == 0 && ds[i + 1] == 0)) {
      k = i;
      break;
    }
  if (k < 0) return s;
  double lo = ls[k], hi = ls[k + 1];
  const int s_lo = sign(ds[k]);
  if (s_lo == 0) {
    hi = lo;
  } else {
    while (hi - lo > o.lambda_tol) {
      const double mid = 0.5 * (lo + hi);
      const int sm = sign(disp(mid));
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm == s_lo ? lo : hi) = mid;
    }
  }
  s.lambda = 0.5 * (lo + hi);
  const auto r = integrate_with_variations(tmpl.at(*s.lambda), x, io);
  if (r.completed()) s.multiplier = r.ux_T;
  return s;
}

std::vector<LambdaSample> lambda_curve(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi,
                                       const std::vector<double>& x_grid, const LambdaOptions& opts) {
  std::vector<LambdaSample> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) out.push_back(lambda_at(tmpl, lambda_lo, lambda_hi, x, opts));
  return out;
}

int count_level_crossings(const std::vector<LambdaSample>& curve, double lambda) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (!curve[i].lambda || !curve[i + 1].lambda) continue;
    const int a = sign(*curve[i].lambda - lambda), b = sign(*curve[i + 1].lambda - lambda);
    if (a != 0 && a != b) ++n;
  }
  return n;
}

FoldPoint locate_fold(const FamilyTemplate& tmpl, double lambda_lo, double lambda_hi, double x_lo, double x_hi,
                      const LambdaOptions& opts) {
  if (!(x_hi > x_lo && x_lo > 0.0)) throw PreconditionError("invalid fold bracket");
  auto slope = [&](double x) {
    const auto s = lambda_at(tmpl, lambda_lo, lambda_hi, x, opts);
    if (!s.lambda || !s.multiplier) throw NumericalError("fold bracket leaves the domain of Lambda");
    return std::pair{1.0 - *s.multiplier, *s.lambda};
  };
  const int s_lo = sign(slope(x_lo).first);
  const int s_hi = sign(slope(x_hi).first);
  if (s_lo * s_hi >= 0) throw PreconditionError("no extremum of Lambda bracketed");
  double lo = x_lo, hi = x_hi;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    const int sm = sign(slope(mid).first);
    if (sm == 0) {
      lo = hi = mid;
      break;
    }
    (sm == s_lo ? lo : hi) = mid;
  }
  FoldPoint f;
  f.x = 0.5 * (lo + hi);
  const auto [g, lambda] = slope(f.x);
  f.lambda = lambda;
  IntegratorOptions io = opts.integrator;
  io.keep_trajectory = false;
  const auto r = integrate_with_variations(tmpl.at(lambda), f.x, io);
  f.multiplier = r.ux_T;
  f.uxx = r.uxx_T;
  (void)g;
  return f;
}

}  // namespace abel
