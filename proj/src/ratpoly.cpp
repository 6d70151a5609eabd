#include "abel/ratpoly.hpp"

#include <algorithm>
#include <sstream>

namespace abel {

RatPoly::RatPoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) { normalize(); }

RatPoly::RatPoly(std::initializer_list<Rational> coefficients) : coeffs_(coefficients) { normalize(); }

void RatPoly::normalize() {
  for (auto& c : coeffs_) c.canonicalize();
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
  approx_.resize(coeffs_.size());
  std::transform(coeffs_.begin(), coeffs_.end(), approx_.begin(), [](const Rational& q) { return q.get_d(); });
}

RatPoly RatPoly::constant(const Rational& c) { return RatPoly({c}); }

RatPoly RatPoly::monomial(const Rational& c, int power) {
  if (power < 0) throw PreconditionError("negative monomial power");
  std::vector<Rational> v(static_cast<std::size_t>(power) + 1);
  v.back() = c;
  return RatPoly(std::move(v));
}

RatPoly RatPoly::linear_factor(const Rational& r) { return RatPoly({Rational(-r), Rational(1)}); }

Rational RatPoly::coefficient(int k) const {
  if (k < 0 || k > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(k)];
}

Rational RatPoly::leading() const { return is_zero() ? Rational(0) : coeffs_.back(); }

Rational RatPoly::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

double RatPoly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = approx_.rbegin(); it != approx_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RatPoly RatPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<long>(k);
  return RatPoly(std::move(d));
}

RatPoly RatPoly::antiderivative() const {
  if (is_zero()) return {};
  std::vector<Rational> a(coeffs_.size() + 1);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) a[k + 1] = coeffs_[k] / static_cast<long>(k + 1);
  return RatPoly(std::move(a));
}

RatPoly RatPoly::monic() const {
  if (is_zero()) return {};
  const Rational lc = leading();
  std::vector<Rational> v(coeffs_);
  for (auto& c : v) c /= lc;
  return RatPoly(std::move(v));
}

RatPoly RatPoly::operator-() const {
  std::vector<Rational> v(coeffs_);
  for (auto& c : v) c = -c;
  return RatPoly(std::move(v));
}

RatPoly operator+(const RatPoly& a, const RatPoly& b) {
  std::vector<Rational> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
  return RatPoly(std::move(v));
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) { return a + (-b); }

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RatPoly(std::move(v));
}

RatPoly operator*(const Rational& c, const RatPoly& p) {
  std::vector<Rational> v(p.coeffs_);
  for (auto& x : v) x *= c;
  return RatPoly(std::move(v));
}

RatPoly RatPoly::pow(unsigned k) const {
  RatPoly result = constant(1);
  for (unsigned i = 0; i < k; ++i) result = result * *this;
  return result;
}

RatPoly::DivMod RatPoly::divmod(const RatPoly& divisor) const {
  if (divisor.is_zero()) throw PreconditionError("polynomial division by zero");
  std::vector<Rational> r(coeffs_);
  const int dd = divisor.degree();
  const int qd = degree() - dd;
  if (qd < 0) return {RatPoly{}, *this};
  std::vector<Rational> q(static_cast<std::size_t>(qd) + 1);
  const Rational& lc = divisor.coeffs_.back();
  for (int k = qd; k >= 0; --k) {
    const Rational f = r[static_cast<std::size_t>(k + dd)] / lc;
    q[static_cast<std::size_t>(k)] = f;
    if (sgn(f) == 0) continue;
    for (int j = 0; j <= dd; ++j) r[static_cast<std::size_t>(k + j)] -= f * divisor.coeffs_[static_cast<std::size_t>(j)];
  }
  r.resize(static_cast<std::size_t>(dd));
  return {RatPoly(std::move(q)), RatPoly(std::move(r))};
}

std::string RatPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = coeffs_[static_cast<std::size_t>(k)];
    if (sgn(c) == 0) continue;
    Rational mag = abs(c);
    os << (sgn(c) < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    const bool unit = mag == 1;
    if (!unit || k == 0) os << mag.get_str();
    if (k > 0) os << (unit ? "" : "*") << var;
    if (k > 1) os << "^" << k;
    first = false;
  }
  return os.str();
}

RatPoly rem(const RatPoly& a, const RatPoly& b) { return a.divmod(b).remainder; }

RatPoly gcd(const RatPoly& a, const RatPoly& b) {
  RatPoly x = a;
  RatPoly y = b;
  while (!y.is_zero()) {
    RatPoly r = rem(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

RatPoly squarefree_part(const RatPoly& p) {
  if (p.degree() < 1) return p;
  const RatPoly g = gcd(p, p.derivative());
  return p.divmod(g).quotient;
}

}  // namespace abel
