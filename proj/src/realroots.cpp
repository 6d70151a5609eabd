#include "abel/realroots.hpp"

#include <algorithm>

namespace abel {

int SignSequence::variations() const {
  int count = 0;
  int last = 0;
  for (const int s : values) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

SignSequence SignSequence::at(const std::vector<RatPoly>& polys, const Rational& x) {
  SignSequence seq;
  seq.values.reserve(polys.size());
  for (const auto& p : polys) seq.values.push_back(p.sign_at(x));
  return seq;
}

Interval::Interval(Rational lo_, Rational hi_, bool lo_open_, bool hi_open_)
    : lo(std::move(lo_)), hi(std::move(hi_)), lo_open(lo_open_), hi_open(hi_open_) {
  if (!(lo < hi)) throw PreconditionError("interval requires lo < hi");
}

bool Interval::contains(const Rational& x) const {
  const bool above = lo_open ? x > lo : x >= lo;
  const bool below = hi_open ? x < hi : x <= hi;
  return above && below;
}

std::vector<RatPoly> signed_remainder_sequence(const RatPoly& p, const RatPoly& q) {
  if (p.is_zero()) throw PreconditionError("undefined sequence");
  std::vector<RatPoly> seq{p};
  if (q.is_zero()) return seq;
  seq.push_back(q);
  for (;;) {
    RatPoly r = -rem(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

std::vector<RatPoly> sturm_sequence(const RatPoly& p) { return signed_remainder_sequence(p, p.derivative()); }

namespace {

void require_nonroot_endpoints(const RatPoly& p, const Interval& iv) {
  if (p.is_zero()) throw PreconditionError("root counting on the zero polynomial");
  if (p.sign_at(iv.lo) == 0 || p.sign_at(iv.hi) == 0)
    throw PreconditionError("endpoint is a root; perturb interval");
}

// Sturm sequence with every member divided by the absolute value of its leading coefficient.
// Positive rescaling leaves all sign variations intact and keeps coefficient growth in check.
std::vector<RatPoly> counting_sequence(const RatPoly& p) {
  std::vector<RatPoly> seq{p, p.derivative()};
  if (seq.back().is_zero()) seq.pop_back();
  while (seq.size() >= 2) {
    RatPoly r = -rem(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    seq.push_back(Rational(1) / abs(r.leading()) * r);
  }
  return seq;
}

int sturm_count_unchecked(const std::vector<RatPoly>& seq, const Interval& iv) {
  return SignSequence::at(seq, iv.lo).variations() - SignSequence::at(seq, iv.hi).variations();
}

}  // namespace

int sturm_count(const RatPoly& p, const Interval& iv) {
  require_nonroot_endpoints(p, iv);
  return sturm_count_unchecked(counting_sequence(p), iv);
}

std::vector<RatPoly> derivative_list(const RatPoly& p) {
  std::vector<RatPoly> der{p};
  for (int k = 0; k < p.degree(); ++k) der.push_back(der.back().derivative());
  return der;
}

int budan_fourier_bound(const RatPoly& p, const Interval& iv) {
  require_nonroot_endpoints(p, iv);
  const auto der = derivative_list(p);
  return SignSequence::at(der, iv.lo).variations() - SignSequence::at(der, iv.hi).variations();
}

Rational resultant(const RatPoly& p, const RatPoly& q) {
  if (p.is_zero() || q.is_zero()) throw PreconditionError("resultant of a zero polynomial");
  const int m = p.degree();
  const int n = q.degree();
  const int size = m + n;
  if (size == 0) return Rational(1);
  std::vector<std::vector<Rational>> mat(static_cast<std::size_t>(size), std::vector<Rational>(static_cast<std::size_t>(size)));
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k) mat[row][row + k] = p.coefficient(m - k);
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k) mat[n + row][row + k] = q.coefficient(n - k);

  Rational det(1);
  for (int col = 0; col < size; ++col) {
    int pivot = col;
    while (pivot < size && sgn(mat[pivot][col]) == 0) ++pivot;
    if (pivot == size) return Rational(0);
    if (pivot != col) {
      std::swap(mat[pivot], mat[col]);
      det = -det;
    }
    det *= mat[col][col];
    for (int row = col + 1; row < size; ++row) {
      if (sgn(mat[row][col]) == 0) continue;
      const Rational f = mat[row][col] / mat[col][col];
      for (int k = col; k < size; ++k) mat[row][k] -= f * mat[col][k];
    }
  }
  return det;
}

Rational discriminant(const RatPoly& p) {
  const int n = p.degree();
  if (n < 1) throw PreconditionError("discriminant requires degree >= 1");
  Rational d = resultant(p, p.derivative()) / p.leading();
  if ((n * (n - 1) / 2) % 2 == 1) d = -d;
  return d;
}

Rational root_bound(const RatPoly& p) {
  if (p.degree() < 1) return Rational(1);
  Rational m(0);
  const Rational lc = abs(p.leading());
  for (int k = 0; k < p.degree(); ++k) {
    Rational r = abs(p.coefficient(k)) / lc;
    if (r > m) m = r;
  }
  return m + 1;
}

namespace {

// A point strictly inside (lo, hi) that is not a root of p.
Rational nonroot_split(const RatPoly& p, const Rational& lo, const Rational& hi) {
  Rational mid = (lo + hi) / 2;
  Rational step = (hi - lo) / 8;
  while (p.sign_at(mid) == 0) {
    mid += step;
    step /= 2;
  }
  return mid;
}

}  // namespace

std::vector<Interval> isolate_real_roots(const RatPoly& p) {
  if (p.is_zero()) throw PreconditionError("cannot isolate roots of the zero polynomial");
  const RatPoly sq = squarefree_part(p);
  std::vector<Interval> found;
  if (sq.degree() < 1) return found;
  const auto seq = counting_sequence(sq);
  const Rational bound = root_bound(sq);
  std::vector<Interval> work{Interval(-bound, bound)};
  while (!work.empty()) {
    Interval iv = work.back();
    work.pop_back();
    const int count = sturm_count_unchecked(seq, iv);
    if (count == 0) continue;
    if (count == 1) {
      found.push_back(iv);
      continue;
    }
    const Rational mid = nonroot_split(sq, iv.lo, iv.hi);
    work.emplace_back(iv.lo, mid);
    work.emplace_back(mid, iv.hi);
  }
  std::sort(found.begin(), found.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return found;
}

Interval refine_root(const RatPoly& p, Interval iv, const Rational& width) {
  int s_lo = p.sign_at(iv.lo);
  if (s_lo == 0 || p.sign_at(iv.hi) == 0 || s_lo == p.sign_at(iv.hi))
    throw PreconditionError("refine_root needs an isolating interval with a sign change");
  while (iv.width() > width) {
    const Rational mid = iv.midpoint();
    const int s = p.sign_at(mid);
    if (s == 0) {
      // Exact root: shrink symmetrically around it, staying inside the old interval.
      Rational half = width / 4;
      const Rational room = (mid - iv.lo < iv.hi - mid ? Rational(mid - iv.lo) : Rational(iv.hi - mid)) / 2;
      if (room < half) half = room;
      return Interval(mid - half, mid + half);
    }
    if (s == s_lo) {
      iv.lo = mid;
    } else {
      iv.hi = mid;
    }
  }
  return iv;
}

int sign_at_root(const RatPoly& r, const RatPoly& p, const Interval& iv) {
  if (r.is_zero()) return 0;
  const RatPoly g = gcd(p, r);
  if (g.degree() >= 1 && g.sign_at(iv.lo) != 0 && g.sign_at(iv.hi) != 0 && sturm_count(g, iv) > 0) return 0;
  const auto r_seq = counting_sequence(r);
  Interval cur = iv;
  const int s_lo = p.sign_at(cur.lo);
  for (;;) {
    if (r.sign_at(cur.lo) != 0 && r.sign_at(cur.hi) != 0 && sturm_count_unchecked(r_seq, cur) == 0)
      return r.sign_at(cur.hi);
    const Rational mid = cur.midpoint();
    const int s = p.sign_at(mid);
    if (s == 0) return r.sign_at(mid);
    if (s == s_lo) {
      cur.lo = mid;
    } else {
      cur.hi = mid;
    }
  }
}

}  // namespace abel
