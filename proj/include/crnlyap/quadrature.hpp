#pragma once

#include <array>
#include <cmath>
#include <type_traits>

#include <Eigen/Dense>

#include "crnlyap/errors.hpp"

namespace crnlyap {

namespace detail {

struct GaussLegendre16 {
  std::array<double, 16> nodes;
  std::array<double, 16> weights;
};

const GaussLegendre16& gauss_legendre_16();

inline double magnitude(double v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.template lpNorm<Eigen::Infinity>();
}

template <typename F>
auto panel(const F& f, double a, double b) {
  const auto& rule = gauss_legendre_16();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using Value = std::decay_t<decltype(f(a))>;
  Value sum = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (std::size_t k = 1; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return Value(half * sum);
}

template <typename F, typename Value>
Value refine(const F& f, double a, double b, const Value& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const Value left = panel(f, a, m);
  const Value right = panel(f, m, b);
  const Value both = left + right;
  if (magnitude(both - whole) < tol || depth >= 40) return both;
  return Value(refine(f, a, m, left, 0.5 * tol, depth + 1) + refine(f, m, b, right, 0.5 * tol, depth + 1));
}

}  // namespace detail

/// Adaptive composite 16-point Gauss-Legendre quadrature of f over [a, b].
/// Panels are halved until two successive estimates differ by less than
/// abs_tol + rel_tol * |estimate|. Works for scalar and Eigen-valued f.
template <typename F>
auto integrate_gl(const F& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-14) {
  using Value = std::decay_t<decltype(f(a))>;
  if (a == b) return Value(0.0 * f(a));
  const Value whole = detail::panel(f, a, b);
  const double tol = abs_tol + rel_tol * detail::magnitude(whole);
  return detail::refine(f, a, b, whole, tol, 0);
}

}  // namespace crnlyap
