#include "degreelab/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace degreelab {

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // 53 bits of mantissa as an integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational result{BigInt(scaled)};
  BigInt power = 1;
  power <<= std::abs(exponent);
  if (exponent >= 0)
    result *= Rational(power);
  else
    result /= Rational(power);
  return result;
}

bool exact_inverse(const RatMatrix& m, RatMatrix& inverse) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) return false;
  RatMatrix a = m;
  inverse = RatMatrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) return false;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      inverse.row(pivot).swap(inverse.row(col));
    }
    const Rational scale = a(col, col);
    for (Eigen::Index j = 0; j < n; ++j) {
      a(col, j) /= scale;
      inverse(col, j) /= scale;
    }
    for (Eigen::Index row = 0; row < n; ++row) {
      if (row == col || a(row, col) == 0) continue;
      const Rational factor = a(row, col);
      for (Eigen::Index j = 0; j < n; ++j) {
        a(row, j) -= factor * a(col, j);
        inverse(row, j) -= factor * inverse(col, j);
      }
    }
  }
  return true;
}

Rational exact_determinant(const RatMatrix& m) {
  const Eigen::Index n = m.rows();
  RatMatrix a = m;
  Rational det = 1;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index row = col + 1; row < n; ++row) {
      if (a(row, col) == 0) continue;
      const Rational factor = a(row, col) / a(col, col);
      for (Eigen::Index j = col; j < n; ++j) a(row, j) -= factor * a(col, j);
    }
  }
  return det;
}

RatMatrix column_span_basis(const RatMatrix& columns) {
  // Row-reduce the transpose; its nonzero rows span the same space.
  RatMatrix a = columns.transpose();
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index pivot = rank;
    while (pivot < rows && a(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    a.row(pivot).swap(a.row(rank));
    const Rational scale = a(rank, col);
    for (Eigen::Index j = 0; j < cols; ++j) a(rank, j) /= scale;
    for (Eigen::Index row = 0; row < rows; ++row) {
      if (row == rank || a(row, col) == 0) continue;
      const Rational factor = a(row, col);
      for (Eigen::Index j = 0; j < cols; ++j) a(row, j) -= factor * a(rank, j);
    }
    ++rank;
  }
  return a.topRows(rank).transpose();
}

}  // namespace degreelab
