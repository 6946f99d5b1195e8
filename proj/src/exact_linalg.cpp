#include "crnlyap/exact_linalg.hpp"

namespace crnlyap {

RationalMatrix to_rational(const IntMatrix& m) {
  RationalMatrix out(static_cast<std::size_t>(m.rows()),
                     std::vector<Rational>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(m(i, j));
    }
  }
  return out;
}

RowEchelon rref(RationalMatrix m) {
  RowEchelon result;
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m.front().size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[row], m[pivot]);
    const Rational inv = Rational(1) / m[row][col];
    for (auto& entry : m[row]) entry *= inv;
    for (std::size_t other = 0; other < rows; ++other) {
      if (other == row || m[other][col] == 0) continue;
      const Rational factor = m[other][col];
      for (std::size_t c = col; c < cols; ++c) m[other][c] -= factor * m[row][c];
    }
    result.pivots.push_back(col);
    ++row;
  }
  result.reduced = std::move(m);
  return result;
}

std::vector<std::vector<Rational>> null_space(const RationalMatrix& m, std::size_t num_cols) {
  const RowEchelon e = rref(m);
  std::vector<bool> is_pivot(num_cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < num_cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(num_cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

IntVector primitive_integer(const std::vector<Rational>& v) {
  BigInt lcm_den = 1;
  for (const auto& x : v) {
    const BigInt d = boost::multiprecision::denominator(x);
    lcm_den = lcm_den / gcd(lcm_den, d) * d;
  }
  std::vector<BigInt> ints;
  BigInt g = 0;
  for (const auto& x : v) {
    const BigInt n = boost::multiprecision::numerator(x) * (lcm_den / boost::multiprecision::denominator(x));
    ints.push_back(n);
    g = gcd(g, n);
  }
  IntVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) {
    const BigInt q = g == 0 ? BigInt(0) : ints[j] / g;
    out(static_cast<Eigen::Index>(j)) = q.convert_to<long long>();
  }
  return out;
}

std::vector<std::size_t> independent_rows(const IntMatrix& m) {
  // Pivot columns of the transpose are independent rows of m, in index order.
  IntMatrix t = m.transpose();
  return rref(to_rational(t)).pivots;
}

std::size_t rank(const IntMatrix& m) { return rref(to_rational(m)).rank(); }

}  // namespace crnlyap
