#pragma once

// Scalar and matrix aliases shared by the whole library. Exact work is done in
// GMP-backed rationals wrapped by Boost.Multiprecision; expression templates
// are disabled so the types compose cleanly with Eigen.

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace degreelab {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<std::int64_t>;
using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Exact rational value of a finite double (every double is dyadic).
Rational exact_rational(double x);

inline std::string to_string(const Rational& q) { return q.str(); }

template <typename To, typename From>
Matrix<To> cast_matrix(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<To, double> && !std::is_arithmetic_v<From>)
        out(i, j) = to_double(m(i, j));
      else
        out(i, j) = To(m(i, j));
    }
  return out;
}

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

inline Matrix<double> to_double(const RatMatrix& m) { return cast_matrix<double>(m); }

/// Exact inverse by Gauss-Jordan elimination; returns false when singular.
bool exact_inverse(const RatMatrix& m, RatMatrix& inverse);

/// Exact determinant by fraction-free elimination.
Rational exact_determinant(const RatMatrix& m);

/// Row-reduced basis of the column span of `columns` (exact).
RatMatrix column_span_basis(const RatMatrix& columns);

}  // namespace degreelab
