#include "crnlyap/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crnlyap {

namespace {

int sign(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Sign changes of the Sturm sequence at s, ignoring zeros.
std::size_t sign_changes(const std::vector<Polynomial>& seq, const Rational& s) {
  std::size_t changes = 0;
  int last = 0;
  for (const auto& p : seq) {
    const int sg = sign(p(s));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

// Root bound: every real root lies in (-B, B).
Rational cauchy_bound(const Polynomial& p) {
  Rational max_ratio = 0;
  for (int i = 0; i < p.degree(); ++i) {
    const Rational r = abs(p.coefficients()[static_cast<std::size_t>(i)] / p.leading());
    if (r > max_ratio) max_ratio = r;
  }
  return 1 + max_ratio;
}

}  // namespace

Polynomial::Polynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::operator()(const Rational& s) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + to_double(*it);
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
  return Polynomial(std::move(d));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] -= b.coeffs_[i];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(out));
}

DivisionResult divide(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {Polynomial(), a};
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - db + 1), Rational(0));
  for (int k = a.degree(); k >= db; --k) {
    const Rational factor = rem[static_cast<std::size_t>(k)] / b.leading();
    quot[static_cast<std::size_t>(k - db)] = factor;
    if (factor == 0) continue;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(k - db + j)] -= factor * b.coefficients()[static_cast<std::size_t>(j)];
    }
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = divide(a, b).remainder;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  std::vector<Rational> monic = a.coefficients();
  const Rational lead = monic.back();
  for (auto& c : monic) c /= lead;
  return Polynomial(std::move(monic));
}

Polynomial square_free_part(const Polynomial& p) {
  if (p.degree() <= 0) return p;
  return divide(p, gcd(p, p.derivative())).quotient;
}

std::vector<Polynomial> sturm_sequence(const Polynomial& p) {
  std::vector<Polynomial> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  Polynomial d = p.derivative();
  while (!d.is_zero()) {
    seq.push_back(d);
    const auto& prev = seq[seq.size() - 2];
    d = Polynomial() - divide(prev, seq.back()).remainder;
  }
  return seq;
}

std::size_t count_roots(const std::vector<Polynomial>& sturm, const Rational& a, const Rational& b) {
  if (sturm.empty()) throw std::domain_error("cannot count roots of the zero polynomial");
  const auto va = sign_changes(sturm, a);
  const auto vb = sign_changes(sturm, b);
  return va >= vb ? va - vb : 0;
}

std::vector<double> positive_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::domain_error("the zero polynomial has infinitely many roots");
  const Polynomial q = square_free_part(p);
  std::vector<double> roots;
  if (q.degree() < 1) return roots;
  const auto seq = sturm_sequence(q);
  const Rational upper = cauchy_bound(q);

  // Isolate: every interval (a, b] on the stack holds at least one root.
  struct Interval {
    Rational a, b;
    std::size_t count;
  };
  std::vector<Interval> stack;
  const std::size_t total = count_roots(seq, Rational(0), upper);
  if (total > 0) stack.push_back({Rational(0), upper, total});
  std::vector<std::pair<Rational, Rational>> isolated;
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    if (iv.count == 1) {
      isolated.emplace_back(iv.a, iv.b);
      continue;
    }
    const Rational mid = (iv.a + iv.b) / 2;
    const auto left = count_roots(seq, iv.a, mid);
    if (left > 0) stack.push_back({iv.a, mid, left});
    if (iv.count > left) stack.push_back({mid, iv.b, iv.count - left});
  }

  // Refine each simple root by exact bisection on the sign of q.
  for (auto [a, b] : isolated) {
    if (q(b) == 0) {
      roots.push_back(to_double(b));
      continue;
    }
    const int sb = sign(q(b));
    for (int iter = 0; iter < 200; ++iter) {
      const double da = to_double(a);
      const double db = to_double(b);
      if (std::nextafter(da, db) >= db) break;
      // Bisect at a dyadic point near the midpoint to keep denominators small.
      const Rational mid = from_double(0.5 * (da + db));
      if (mid <= a || mid >= b) break;
      const int sm = sign(q(mid));
      if (sm == 0) {
        a = b = mid;
        break;
      }
      if (sm == sb) {
        b = mid;
      } else {
        a = mid;
      }
    }
    roots.push_back(to_double(b));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace crnlyap
