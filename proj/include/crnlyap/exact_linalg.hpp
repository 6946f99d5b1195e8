#pragma once

#include <cstddef>
#include <vector>

#include "crnlyap/model.hpp"
#include "crnlyap/rational.hpp"

namespace crnlyap {

/// Dense row-major rational matrix.
using RationalMatrix = std::vector<std::vector<Rational>>;

struct RowEchelon {
  RationalMatrix reduced;           // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

RationalMatrix to_rational(const IntMatrix& m);

/// Gauss-Jordan elimination over the rationals.
RowEchelon rref(RationalMatrix m);

/// Basis of {y : m y = 0}, one vector per free column.
std::vector<std::vector<Rational>> null_space(const RationalMatrix& m, std::size_t num_cols);

/// Scales a rational vector to a primitive integer vector with the same
/// direction (first nonzero entry sign preserved).
IntVector primitive_integer(const std::vector<Rational>& v);

/// Indices of a maximal linearly independent subset of the rows of m,
/// chosen greedily in index order.
std::vector<std::size_t> independent_rows(const IntMatrix& m);

std::size_t rank(const IntMatrix& m);

}  // namespace crnlyap
