#include "degreelab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "degreelab/errors.hpp"

namespace degreelab {

IntPoly::IntPoly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
  for (long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

void IntPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational IntPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + Rational(*it);
  return acc;
}

Complex IntPoly::eval(Complex x) const {
  Complex acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

std::vector<Complex> IntPoly::to_complex() const {
  std::vector<Complex> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.emplace_back(to_double(c), 0.0);
  return out;
}

IntPoly IntPoly::derivative() const {
  std::vector<BigInt> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * BigInt(i));
  return IntPoly(std::move(out));
}

BigInt IntPoly::content() const {
  BigInt g = 0;
  for (const auto& c : coeffs_) g = gcd(g, c);
  return g;
}

IntPoly IntPoly::primitive() const {
  if (is_zero()) return *this;
  BigInt g = content();
  if (leading() < 0) g = -g;
  std::vector<BigInt> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c / g);
  return IntPoly(std::move(out));
}

std::string IntPoly::str(char var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& c = coeffs_[i];
    if (c == 0) continue;
    BigInt mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1 || i == 0) os << mag;
    if (i > 0) {
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return IntPoly(std::move(out));
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<BigInt> out(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
  return IntPoly(std::move(out));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<BigInt> out(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] -= b.coeffs_[i];
  return IntPoly(std::move(out));
}

IntPoly primitive_from_rational(const std::vector<Rational>& coeffs) {
  BigInt common = 1;
  for (const auto& c : coeffs) common = lcm(common, denominator(c));
  std::vector<BigInt> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(numerator(c) * (common / denominator(c)));
  return IntPoly(std::move(out)).primitive();
}

namespace {

// Remainder of a / b over Q, returned as a primitive integer polynomial.
IntPoly primitive_remainder(const IntPoly& a, const IntPoly& b) {
  std::vector<Rational> r(a.coeffs().begin(), a.coeffs().end());
  const int db = b.degree();
  const Rational lead(b.leading());
  for (int k = a.degree(); k >= db; --k) {
    if (r[k] == 0) continue;
    const Rational factor = r[k] / lead;
    for (int j = 0; j <= db; ++j) r[k - db + j] -= factor * Rational(b[j]);
  }
  r.resize(static_cast<std::size_t>(std::max(db, 0)));
  return primitive_from_rational(r);
}

}  // namespace

IntPoly poly_gcd(const IntPoly& a, const IntPoly& b) {
  IntPoly x = a.primitive();
  IntPoly y = b.primitive();
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    IntPoly r = primitive_remainder(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x.primitive();
}

IntPoly divide_exact(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw Error(ErrorKind::NumericalFailure, "divide_exact: division by zero polynomial");
  if (a.is_zero()) return {};
  const int da = a.degree();
  const int db = b.degree();
  if (da < db) throw Error(ErrorKind::NumericalFailure, "divide_exact: divisor degree too large");
  std::vector<Rational> r(a.coeffs().begin(), a.coeffs().end());
  std::vector<Rational> q(static_cast<std::size_t>(da - db + 1), Rational(0));
  const Rational lead(b.leading());
  for (int k = da; k >= db; --k) {
    if (r[k] == 0) continue;
    const Rational factor = r[k] / lead;
    q[k - db] = factor;
    for (int j = 0; j <= db; ++j) r[k - db + j] -= factor * Rational(b[j]);
  }
  for (int k = 0; k < db; ++k)
    if (r[k] != 0) throw Error(ErrorKind::NumericalFailure, "divide_exact: nonzero remainder");
  return primitive_from_rational(q);
}

std::vector<std::pair<IntPoly, int>> squarefree_decomposition(const IntPoly& p) {
  std::vector<std::pair<IntPoly, int>> out;
  IntPoly a = p.primitive();
  if (a.degree() <= 0) return out;
  IntPoly c = poly_gcd(a, a.derivative());
  IntPoly w = divide_exact(a, c);
  int multiplicity = 1;
  while (c.degree() > 0) {
    IntPoly y = poly_gcd(w, c);
    IntPoly z = divide_exact(w, y);
    if (z.degree() > 0) out.emplace_back(z, multiplicity);
    ++multiplicity;
    w = y;
    c = divide_exact(c, y);
  }
  if (w.degree() > 0) out.emplace_back(w, multiplicity);
  return out;
}

bool is_squarefree(const IntPoly& p) {
  if (p.degree() <= 0) return true;
  return poly_gcd(p, p.derivative()).degree() == 0;
}

IntPoly characteristic_polynomial(const RatMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw Error(ErrorKind::DimensionMismatch, "characteristic_polynomial: matrix not square");
  // Faddeev-LeVerrier: coefficients c_k of x^k, c_n = 1.
  std::vector<Rational> c(static_cast<std::size_t>(n + 1), Rational(0));
  c[n] = 1;
  RatMatrix mk = RatMatrix::Zero(n, n);
  const RatMatrix identity = RatMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * identity;
    const RatMatrix product = m * mk;
    Rational trace = 0;
    for (Eigen::Index i = 0; i < n; ++i) trace += product(i, i);
    c[n - k] = -trace / Rational(k);
  }
  return primitive_from_rational(c);
}

std::optional<Rational> rational_root_near(const IntPoly& p, double locator) {
  if (p.is_zero()) return Rational(0);
  if (!std::isfinite(locator)) return std::nullopt;
  const BigInt lead = abs(p.leading());
  // Divisor enumeration is only attempted for modest leading coefficients.
  if (lead > 1000000) return std::nullopt;
  const long lc = lead.convert_to<long>();
  for (long q = 1; q <= lc; ++q) {
    if (lc % q != 0) continue;
    const double scaled = std::round(locator * static_cast<double>(q));
    if (std::abs(scaled) > 9.0e15) continue;
    const Rational candidate(BigInt(static_cast<long long>(scaled)), BigInt(q));
    if (p.eval(candidate) == 0) return candidate;
  }
  return std::nullopt;
}

Complex horner(std::span<const Complex> coeffs, Complex x) {
  Complex acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

Complex horner_derivative(std::span<const Complex> coeffs, Complex x) {
  Complex acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + coeffs[i] * static_cast<double>(i);
  return acc;
}

// Parlett-Reinsch balancing by powers of two.
void balance(Matrix<Complex>& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(a(j, i));
        row += std::abs(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / radix;
      double f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  std::size_t size = coeffs.size();
  while (size > 0 && coeffs[size - 1] == Complex(0.0)) --size;
  if (size <= 1) return {};
  const auto degree = static_cast<Eigen::Index>(size - 1);
  const Complex lead = coeffs[size - 1];
  std::vector<Complex> roots;
  if (degree == 1) {
    roots.push_back(-coeffs[0] / lead);
    return roots;
  }
  Matrix<Complex> companion = Matrix<Complex>::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / lead;
  balance(companion);
  Eigen::ComplexEigenSolver<Matrix<Complex>> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "polynomial_roots: eigenvalue iteration did not converge");
  const auto poly = coeffs.first(size);
  for (Eigen::Index i = 0; i < degree; ++i) {
    Complex x = solver.eigenvalues()(i);
    double residual = std::abs(horner(poly, x));
    for (int iter = 0; iter < 8 && residual > 0.0; ++iter) {
      const Complex dp = horner_derivative(poly, x);
      if (dp == Complex(0.0)) break;
      const Complex candidate = x - horner(poly, x) / dp;
      const double candidate_residual = std::abs(horner(poly, candidate));
      if (!(candidate_residual < residual)) break;
      x = candidate;
      residual = candidate_residual;
    }
    roots.push_back(x);
  }
  return roots;
}

std::vector<Root> cluster_roots(const std::vector<Complex>& roots, double radius) {
  std::vector<Root> clusters;
  std::vector<Complex> sums;
  for (const Complex& r : roots) {
    bool placed = false;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      if (std::abs(clusters[k].value - r) < radius) {
        sums[k] += r;
        ++clusters[k].multiplicity;
        clusters[k].value = sums[k] / static_cast<double>(clusters[k].multiplicity);
        placed = true;
        break;
      }
    }
    if (!placed) {
      clusters.push_back({r, 1});
      sums.push_back(r);
    }
  }
  return clusters;
}

std::vector<Root> exact_roots(const IntPoly& p) {
  std::vector<Root> out;
  for (const auto& [factor, multiplicity] : squarefree_decomposition(p)) {
    const std::vector<Complex> coeffs = factor.to_complex();
    for (const Complex& r : polynomial_roots(coeffs)) {
      Complex x = r;
      if (auto q = rational_root_near(factor, x.real()); q && std::abs(x.imag()) < 1e-6) {
        x = Complex(to_double(*q), 0.0);
      } else if (std::abs(x.imag()) <= 1e-10 * std::max(1.0, std::abs(x))) {
        // Integer polynomials: an isolated near-real root is real.
        x = Complex(x.real(), 0.0);
      }
      out.push_back({x, multiplicity});
    }
  }
  return out;
}

}  // namespace degreelab
