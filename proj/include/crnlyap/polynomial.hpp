#pragma once

#include <cstddef>
#include <vector>

#include "crnlyap/rational.hpp"

namespace crnlyap {

/// Dense polynomial with exact rational coefficients, lowest degree first.
/// The zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  const Rational& leading() const { return coeffs_.back(); }

  Rational operator()(const Rational& s) const;
  double operator()(double s) const;
  Polynomial derivative() const;

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

struct DivisionResult {
  Polynomial quotient;
  Polynomial remainder;
};

DivisionResult divide(const Polynomial& a, const Polynomial& b);

/// Monic greatest common divisor.
Polynomial gcd(Polynomial a, Polynomial b);

/// p / gcd(p, p'): same distinct roots, all simple.
Polynomial square_free_part(const Polynomial& p);

/// p, p', then negated remainders.
std::vector<Polynomial> sturm_sequence(const Polynomial& p);

/// Number of distinct real roots in (a, b].
std::size_t count_roots(const std::vector<Polynomial>& sturm, const Rational& a, const Rational& b);

/// Distinct positive real roots, ascending, each accurate to about one ulp.
std::vector<double> positive_roots(const Polynomial& p);

}  // namespace crnlyap
