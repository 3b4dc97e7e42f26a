#include "degreelab/mapmodels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "degreelab/errors.hpp"
#include "degreelab/polynomial.hpp"

namespace degreelab {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::PolynomialSkew: return "polynomial_skew";
    case Family::Secant: return "secant";
    case Family::TorusEndo: return "torus_endo";
    case Family::CremonaComposite: return "cremona_composite";
  }
  return "unknown";
}

int PreimageResult::total_multiplicity() const {
  int total = 0;
  for (const auto& p : points) total += p.multiplicity;
  return total;
}

std::vector<ExactClass> SurfaceMapModel::exceptional_image_classes() const {
  std::vector<ExactClass> out;
  for (const auto& entry : indeterminacy)
    if (entry.image_class) out.push_back(*entry.image_class);
  return out;
}

namespace {

[[noreturn]] void reject(const std::string& message) { throw Error(ErrorKind::ModelRejected, message); }

bool is_real(Complex c) { return c.imag() == 0.0; }

std::string format_complex(Complex c) {
  std::ostringstream os;
  os.precision(12);
  if (c.imag() == 0.0)
    os << c.real();
  else
    os << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
  return os.str();
}

// Continued-fraction approximation with bounded denominator.
std::optional<Rational> snap_rational(double x, long max_den = 1000000) {
  if (!std::isfinite(x)) return std::nullopt;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 40; ++iter) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0;
    const long long k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = r - a;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-12 * std::max(1.0, std::abs(x)))
      return Rational(BigInt(h1), BigInt(k1));
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

double coefficient_scale(const HomogeneousTriple<Complex>& t) {
  double s = 0.0;
  for (const auto& c : t)
    for (const auto& [e, v] : c.terms()) s = std::max(s, std::abs(v));
  return s > 0.0 ? s : 1.0;
}

HomogeneousTriple<Rational> rational_triple(const HomogeneousTriple<BigInt>& t) {
  HomogeneousTriple<Rational> out;
  for (int i = 0; i < 3; ++i) out[i] = t[i].map_coeffs<Rational>([](const BigInt& c) { return Rational(c); });
  return out;
}

std::array<Complex, 3> eval_lift(const HomogeneousTriple<Complex>& f, const std::array<Complex, 3>& p) {
  return {f[0].eval(p), f[1].eval(p), f[2].eval(p)};
}

std::array<Rational, 3> eval_lift(const HomogeneousTriple<Rational>& f, const std::array<Rational, 3>& p) {
  return {f[0].eval(p), f[1].eval(p), f[2].eval(p)};
}

bool all_zero(const std::array<Rational, 3>& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

double sup(const std::array<Complex, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

// ---------------------------------------------------------------------------
// Secant tables.

template <typename S>
void secant_tables(const std::vector<S>& a, Matrix<S>& num, Matrix<S>& den) {
  const int d = static_cast<int>(a.size()) - 1;
  const int m = d - 1;
  num = Matrix<S>::Constant(m + 1, m + 1, S(0));
  den = Matrix<S>::Constant(m + 1, m + 1, S(0));
  // P(x) - P(y) = (x - y) * sum_k a_k h_{k-1}(x, y)
  for (int k = 1; k <= d; ++k)
    for (int i = 0; i <= k - 1; ++i) den(i, k - 1 - i) += a[k];
  // x * den - P(x) = -a_0 + sum_{k>=2} a_k x y h_{k-2}(x, y)
  num(0, 0) -= a[0];
  for (int k = 2; k <= d; ++k)
    for (int i = 0; i <= k - 2; ++i) num(i + 1, k - 1 - i) += a[k];
}

// Bihomogeneous evaluation of a bidegree (m, m) table.
template <typename S>
S bihomogeneous(const Matrix<S>& t, const std::array<S, 2>& x, const std::array<S, 2>& y) {
  const Eigen::Index m = t.rows() - 1;
  std::vector<S> xp0(m + 1, S(1)), xp1(m + 1, S(1)), yp0(m + 1, S(1)), yp1(m + 1, S(1));
  for (Eigen::Index k = 1; k <= m; ++k) {
    xp0[k] = xp0[k - 1] * x[0];
    xp1[k] = xp1[k - 1] * x[1];
    yp0[k] = yp0[k - 1] * y[0];
    yp1[k] = yp1[k - 1] * y[1];
  }
  S acc = S(0);
  for (Eigen::Index i = 0; i <= m; ++i)
    for (Eigen::Index j = 0; j <= m; ++j) {
      if (t(i, j) == S(0)) continue;
      acc += t(i, j) * xp0[i] * xp1[m - i] * yp0[j] * yp1[m - j];
    }
  return acc;
}

struct BiValue {
  Complex value, dx, dy;
};

BiValue affine_eval(const Matrix<Complex>& t, Complex x, Complex y) {
  BiValue out{0.0, 0.0, 0.0};
  const Eigen::Index m = t.rows() - 1;
  for (Eigen::Index i = 0; i <= m; ++i)
    for (Eigen::Index j = 0; j <= m; ++j) {
      const Complex c = t(i, j);
      if (c == Complex(0.0)) continue;
      const Complex xi = std::pow(x, static_cast<int>(i));
      const Complex yj = std::pow(y, static_cast<int>(j));
      out.value += c * xi * yj;
      if (i > 0) out.dx += c * static_cast<double>(i) * std::pow(x, static_cast<int>(i - 1)) * yj;
      if (j > 0) out.dy += c * static_cast<double>(j) * xi * std::pow(y, static_cast<int>(j - 1));
    }
  return out;
}

double table_scale(const Matrix<Complex>& a, const Matrix<Complex>& b) {
  const double s = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return s > 0.0 ? s : 1.0;
}

// Coefficients of t -> table(t, y) as a polynomial in x, for fixed y.
std::vector<Complex> x_coefficients(const Matrix<Complex>& t, Complex y) {
  const Eigen::Index m = t.rows() - 1;
  std::vector<Complex> out(m + 1, 0.0);
  for (Eigen::Index i = 0; i <= m; ++i) {
    Complex acc = 0.0;
    for (Eigen::Index j = m; j >= 0; --j) acc = acc * y + t(i, j);
    out[i] = acc;
  }
  return out;
}

Complex sylvester_resultant(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  const int m = static_cast<int>(p.size()) - 1;
  const int n = static_cast<int>(q.size()) - 1;
  const int size = m + n;
  if (size == 0) return 1.0;
  Matrix<Complex> s = Matrix<Complex>::Zero(size, size);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s(r, r + k) = p[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s(n + r, r + k) = q[n - k];
  return s.partialPivLu().determinant();
}

std::vector<Complex> trimmed(std::vector<Complex> c, double rel) {
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  while (!c.empty() && std::abs(c.back()) <= rel * scale) c.pop_back();
  return c;
}

// Common zeros of two univariate polynomials (roots of the first, filtered
// against the second), used on the lines at infinity.
std::vector<Complex> common_roots(const std::vector<Complex>& p, const std::vector<Complex>& q, double scale) {
  const auto tp = trimmed(p, 1e-13);
  const auto tq = trimmed(q, 1e-13);
  const auto& base = (tp.size() >= 2 && (tq.size() < 2 || tp.size() <= tq.size())) ? tp : tq;
  const auto& other = (&base == &tp) ? tq : tp;
  std::vector<Complex> out;
  if (base.size() < 2) return out;
  for (const auto& r : cluster_roots(polynomial_roots(base), 1e-7)) {
    const double w = std::max(1.0, std::pow(std::abs(r.value), static_cast<double>(p.size() - 1)));
    if (std::abs(horner(other, r.value)) <= 1e-8 * scale * w) out.push_back(r.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composite factors.

using Coords = std::array<Complex, 3>;

HomogeneousTriple<BigInt> factor_triple(const CremonaFactor& f) {
  using P = IntPoly3;
  HomogeneousTriple<BigInt> t;
  switch (f.kind) {
    case CremonaFactor::Kind::Involution:
      t = {P::variable(1) * P::variable(2), P::variable(0) * P::variable(2), P::variable(0) * P::variable(1)};
      break;
    case CremonaFactor::Kind::Power:
      for (int i = 0; i < 3; ++i) t[i] = P::variable(i).pow(f.power);
      break;
    case CremonaFactor::Kind::Linear: {
      BigInt common = 1;
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) common = lcm(common, denominator(f.linear(i, j)));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const Rational c = f.linear(i, j) * Rational(common);
          if (c != 0) t[i] += P::monomial(Exponent{j == 0, j == 1, j == 2}, numerator(c));
        }
      break;
    }
  }
  return t;
}

RatMatrix linear_inverse(const CremonaFactor& f) {
  RatMatrix inv;
  if (!exact_inverse(f.linear, inv)) reject("cremona_composite: linear factor is singular");
  return inv;
}

std::vector<Coords> factor_indeterminacy(const CremonaFactor& f) {
  if (f.kind != CremonaFactor::Kind::Involution) return {};
  return {Coords{1.0, 0.0, 0.0}, Coords{0.0, 1.0, 0.0}, Coords{0.0, 0.0, 1.0}};
}

struct WeightedCoords {
  Coords c;
  int multiplicity = 1;
};

// Preimages of q under one factor. `curve_fiber` is set when the fiber is a
// curve (the point lies in the factor's critical image) and is skipped.
std::vector<WeightedCoords> factor_preimages(const CremonaFactor& f, const Coords& q, bool& curve_fiber) {
  const Coords n = normalized(q).coords;
  constexpr double zero = 1e-14;
  std::vector<WeightedCoords> out;
  switch (f.kind) {
    case CremonaFactor::Kind::Involution: {
      int zeros = 0;
      for (const auto& c : n) zeros += std::abs(c) < zero;
      if (zeros > 0) {
        curve_fiber = true;
        return out;
      }
      out.push_back({Coords{n[1] * n[2], n[0] * n[2], n[0] * n[1]}, 1});
      return out;
    }
    case CremonaFactor::Kind::Power: {
      const int k = f.power;
      std::vector<std::vector<Complex>> choices(3);
      int mult = 1;
      for (int i = 0; i < 3; ++i) {
        if (std::abs(n[i]) < zero) {
          choices[i] = {0.0};
          mult *= k;
        }
      }
      std::size_t pivot = 0;
      for (std::size_t i = 1; i < 3; ++i)
        if (std::abs(n[i]) > std::abs(n[pivot])) pivot = i;
      for (std::size_t i = 0; i < 3; ++i) {
        if (!choices[i].empty()) continue;
        if (i == pivot) {
          choices[i] = {1.0};
          continue;
        }
        const Complex r = std::pow(n[i], 1.0 / k);
        for (int j = 0; j < k; ++j) choices[i].push_back(r * std::polar(1.0, 2.0 * std::numbers::pi * j / k));
      }
      for (const auto& a : choices[0])
        for (const auto& b : choices[1])
          for (const auto& c : choices[2]) out.push_back({Coords{a, b, c}, mult});
      return out;
    }
    case CremonaFactor::Kind::Linear: {
      const Matrix<double> inv = to_double(linear_inverse(f));
      Coords c{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i] += inv(i, j) * n[j];
      out.push_back({c, 1});
      return out;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Torus helpers.

IntMatrix gaussian_to_real(const Eigen::Matrix2cd& a) {
  IntMatrix out(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double re = std::round(a(r, c).real());
      const double im = std::round(a(r, c).imag());
      if (std::abs(re - a(r, c).real()) > 1e-9 || std::abs(im - a(r, c).imag()) > 1e-9)
        reject("torus_endo: entry A[" + std::to_string(r) + "][" + std::to_string(c) +
               "] is not a Gaussian integer");
      const auto x = static_cast<std::int64_t>(re);
      const auto y = static_cast<std::int64_t>(im);
      out(2 * r, 2 * c) = x;
      out(2 * r, 2 * c + 1) = -y;
      out(2 * r + 1, 2 * c) = y;
      out(2 * r + 1, 2 * c + 1) = x;
    }
  return out;
}

std::vector<std::array<std::int64_t, 4>> lattice_cosets(const IntMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw Error(ErrorKind::DimensionMismatch, "lattice_cosets: expected 4x4");
  IntMatrix h = m;
  // Column operations to a lower-triangular basis with positive diagonal.
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (h(i, j) == 0) continue;
      std::int64_t a = h(i, i), b = h(i, j);
      std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      std::int64_t r0 = a, r1 = b;
      while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
      }
      const std::int64_t g = r0;
      const Vector<std::int64_t> ci = h.col(i), cj = h.col(j);
      h.col(i) = s0 * ci + t0 * cj;
      h.col(j) = (-b / g) * ci + (a / g) * cj;
    }
    if (h(i, i) < 0) h.col(i) = -h.col(i);
    if (h(i, i) == 0) throw Error(ErrorKind::PreconditionError, "lattice_cosets: matrix is singular");
  }
  std::vector<std::array<std::int64_t, 4>> out;
  std::array<std::int64_t, 4> k{};
  for (k[0] = 0; k[0] < h(0, 0); ++k[0])
    for (k[1] = 0; k[1] < h(1, 1); ++k[1])
      for (k[2] = 0; k[2] < h(2, 2); ++k[2])
        for (k[3] = 0; k[3] < h(3, 3); ++k[3]) out.push_back(k);
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Family builders.

void build_skew(SurfaceMapModel& m, const SkewParams& params) {
  m.family = Family::PolynomialSkew;
  m.lattice = projective_plane_lattice();
  int d = -1, dx = -1;
  bool exact = true;
  for (std::size_t i = 0; i < params.q.size(); ++i)
    for (std::size_t j = 0; j < params.q[i].size(); ++j) {
      const Complex c = params.q[i][j];
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        reject("polynomial_skew: coefficient q[" + std::to_string(i) + "][" + std::to_string(j) + "] is not finite");
      if (c == Complex(0.0)) continue;
      d = std::max(d, static_cast<int>(i + j));
      dx = std::max(dx, static_cast<int>(i));
      exact = exact && is_real(c);
    }
  auto coeff = [&](int i, int j) -> Complex {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= params.q.size()) return 0.0;
    const auto& row = params.q[static_cast<std::size_t>(i)];
    return static_cast<std::size_t>(j) < row.size() ? row[static_cast<std::size_t>(j)] : Complex(0.0);
  };
  if (d < 2) reject("polynomial_skew: Q must have total degree d >= 2");
  if (coeff(0, d) == Complex(0.0))
    reject("polynomial_skew: the coefficient of y^" + std::to_string(d) + " must be nonzero");
  if (coeff(d, 0) != Complex(0.0))
    reject("polynomial_skew: the coefficient of x^" + std::to_string(d) + " must vanish");
  if (dx < 1) reject("polynomial_skew: Q does not depend on x, so the map is not dominant");

  m.lambda2 = dx;
  m.pullback_matrix = IntMatrix::Constant(1, 1, d);
  m.lift_degree = d;

  const ComplexPoly3 x = ComplexPoly3::variable(0), y = ComplexPoly3::variable(1), z = ComplexPoly3::variable(2);
  HomogeneousTriple<Complex> f;
  f[0] = y * z.pow(d - 1);
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j)
      if (coeff(i, j) != Complex(0.0)) f[1].add_term(Exponent{i, j, d - i - j}, coeff(i, j));
  f[2] = z.pow(d);
  m.lift = f;
  m.lift_scale = coefficient_scale(f);
  if (exact) {
    HomogeneousTriple<Rational> e;
    for (int k = 0; k < 3; ++k)
      e[k] = f[k].map_coeffs<Rational>([](const Complex& c) { return exact_rational(c.real()); });
    m.exact_lift = e;
  }

  // I_f: zeros of the top-degree part Q_d on the line at infinity.
  IndeterminacyEntry declared;
  declared.point = ProjPoint{{1.0, 0.0, 0.0}};
  declared.exact_point = ExactProjPoint{{Rational(1), Rational(0), Rational(0)}};
  declared.image_class = make_class<Rational>(m.lattice, {Rational(1)});
  declared.note = "image curve class set to the line at infinity (declared, blowup not derived)";
  m.indeterminacy.push_back(declared);

  std::vector<Complex> top(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i) top[i] = coeff(i, d - i);
  std::vector<Complex> t = trimmed(top, 0.0);
  if (t.size() >= 2) {
    std::optional<IntPoly> exact_top;
    if (exact) {
      std::vector<Rational> r;
      for (const auto& c : t) r.push_back(exact_rational(c.real()));
      exact_top = primitive_from_rational(r);
    }
    for (const auto& root : cluster_roots(polynomial_roots(t), m.options.cluster_radius)) {
      IndeterminacyEntry e;
      e.point = normalized(Coords{root.value, 1.0, 0.0});
      if (exact_top && std::abs(root.value.imag()) < 1e-9)
        if (auto q = rational_root_near(*exact_top, root.value.real()))
          e.exact_point = normalized(std::array<Rational, 3>{*q, Rational(1), Rational(0)});
      e.note = "root of the top-degree part of Q on the line at infinity";
      m.indeterminacy.push_back(e);
    }
  }

  ExceptionalEntry line;
  line.curve_label = "line at infinity {z=0}";
  line.curve_class = make_class<Rational>(m.lattice, {Rational(1)});
  line.image = ProjPoint{{0.0, 1.0, 0.0}};
  line.exact_image = ExactProjPoint{{Rational(0), Rational(1), Rational(0)}};
  m.exceptional.push_back(line);
}

void secant_indeterminacy(SurfaceMapModel& m, const std::optional<IntPoly>& exact_p) {
  const Matrix<Complex>& num = m.secant_num;
  const Matrix<Complex>& den = m.secant_den;
  const int mm = static_cast<int>(num.rows()) - 1;
  const double scale = table_scale(num, den);
  std::vector<std::pair<std::array<Complex, 2>, std::array<Complex, 2>>> found;

  auto add = [&](const std::array<Complex, 2>& x, const std::array<Complex, 2>& y) {
    const BiProjPoint p = normalized(x, y);
    for (const auto& [fx, fy] : found)
      if (distance(SurfacePoint(normalized(fx, fy)), SurfacePoint(p)) < 1e-6) return;
    found.emplace_back(p.x, p.y);
  };

  // Affine chart: resultant in x sampled on the unit circle, interpolated by DFT.
  const int samples = 2 * mm * mm + 1;
  std::vector<Complex> values(samples);
  for (int k = 0; k < samples; ++k) {
    const Complex y = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    values[k] = sylvester_resultant(x_coefficients(num, y), x_coefficients(den, y));
  }
  std::vector<Complex> res(samples);
  for (int l = 0; l < samples; ++l) {
    Complex acc = 0.0;
    for (int k = 0; k < samples; ++k) acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * k * l / samples);
    res[l] = acc / static_cast<double>(samples);
  }
  double res_scale = 0.0;
  for (const auto& v : res) res_scale = std::max(res_scale, std::abs(v));
  if (res_scale < 1e-12 * std::pow(scale, 2 * mm)) {
    m.indeterminacy_complete = false;
    m.notes.push_back("numerator and denominator share a factor; indeterminacy search skipped");
    return;
  }
  const auto res_trim = trimmed(res, 1e-10);
  std::vector<Root> ys = cluster_roots(polynomial_roots(res_trim), 1e-4);
  for (const auto& yr : ys) {
    const auto dcoef = trimmed(x_coefficients(den, yr.value), 1e-13);
    const auto ncoef = trimmed(x_coefficients(num, yr.value), 1e-13);
    const auto& base = dcoef.size() >= 2 ? dcoef : ncoef;
    if (base.size() < 2) continue;
    for (const auto& xr : cluster_roots(polynomial_roots(base), 1e-4)) {
      Complex x = xr.value, y = yr.value;
      for (int it = 0; it < 30; ++it) {
        const BiValue fn = affine_eval(num, x, y), fd = affine_eval(den, x, y);
        const Complex det = fn.dx * fd.dy - fn.dy * fd.dx;
        if (std::abs(det) < 1e-300) break;
        const Complex sx = (fn.value * fd.dy - fd.value * fn.dy) / det;
        const Complex sy = (fd.value * fn.dx - fn.value * fd.dx) / det;
        x -= sx;
        y -= sy;
        if (std::abs(sx) + std::abs(sy) < 1e-15 * (1.0 + std::abs(x) + std::abs(y))) break;
      }
      const double w = std::pow(std::max({1.0, std::abs(x), std::abs(y)}), 2 * mm);
      if (std::abs(affine_eval(num, x, y).value) <= 1e-9 * scale * w &&
          std::abs(affine_eval(den, x, y).value) <= 1e-9 * scale * w)
        add({x, 1.0}, {y, 1.0});
    }
  }

  // Lines at infinity.
  std::vector<Complex> n_xinf(mm + 1), d_xinf(mm + 1), n_yinf(mm + 1), d_yinf(mm + 1);
  for (int k = 0; k <= mm; ++k) {
    n_xinf[k] = num(mm, k);
    d_xinf[k] = den(mm, k);
    n_yinf[k] = num(k, mm);
    d_yinf[k] = den(k, mm);
  }
  for (const Complex& y : common_roots(n_xinf, d_xinf, scale)) add({1.0, 0.0}, {y, 1.0});
  for (const Complex& x : common_roots(n_yinf, d_yinf, scale)) add({x, 1.0}, {1.0, 0.0});
  if (std::abs(num(mm, mm)) <= 1e-13 * scale && std::abs(den(mm, mm)) <= 1e-13 * scale)
    add({1.0, 0.0}, {1.0, 0.0});

  auto exact_coordinate = [&](const std::array<Complex, 2>& c) -> std::optional<std::array<Rational, 2>> {
    if (std::abs(c[1]) < 1e-12) return std::array<Rational, 2>{Rational(1), Rational(0)};
    const Complex v = c[0] / c[1];
    if (!exact_p || std::abs(v.imag()) > 1e-9) return std::nullopt;
    auto q = rational_root_near(*exact_p, v.real());
    if (!q) q = snap_rational(v.real());
    if (!q) return std::nullopt;
    return std::array<Rational, 2>{*q, Rational(1)};
  };

  for (const auto& [x, y] : found) {
    IndeterminacyEntry e;
    e.point = normalized(x, y);
    e.note = "common zero of the cancelled numerator and denominator (numerical)";
    if (m.exact_secant_num) {
      const auto ex = exact_coordinate(x), ey = exact_coordinate(y);
      if (ex && ey) {
        const ExactBiProjPoint p = normalized(*ex, *ey);
        if (bihomogeneous(*m.exact_secant_num, p.x, p.y) == 0 && bihomogeneous(*m.exact_secant_den, p.x, p.y) == 0)
          e.exact_point = p;
      }
    }
    m.indeterminacy.push_back(e);
  }
}

void build_secant(SurfaceMapModel& m, const SecantParams& params) {
  m.family = Family::Secant;
  m.lattice = product_lattice();
  std::vector<Complex> p = params.p;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag()))
      reject("secant: coefficient p[" + std::to_string(k) + "] is not finite");
  while (!p.empty() && p.back() == Complex(0.0)) p.pop_back();
  const int d = static_cast<int>(p.size()) - 1;
  if (d < 2) reject("secant: P must have degree d >= 2");
  const bool exact = std::all_of(p.begin(), p.end(), is_real);

  std::optional<IntPoly> exact_p;
  if (exact) {
    std::vector<Rational> r;
    for (const auto& c : p) r.push_back(exact_rational(c.real()));
    exact_p = primitive_from_rational(r);
    const IntPoly g = poly_gcd(*exact_p, exact_p->derivative());
    if (g.degree() > 0) {
      std::string roots;
      for (const auto& root : exact_roots(g)) {
        if (!roots.empty()) roots += ", ";
        roots += format_complex(root.value);
      }
      reject("secant: P is not squarefree: gcd(P, P') = " + g.str('z') + " is nonconstant (repeated root " + roots +
             ")");
    }
    m.notes.push_back("squarefree certificate: gcd(P, P') = " + g.str('z'));
  } else {
    const auto roots = polynomial_roots(p);
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = i + 1; j < roots.size(); ++j) sep = std::min(sep, std::abs(roots[i] - roots[j]));
    if (sep < 1e-6)
      reject("secant: P has numerically repeated roots (minimum root separation " + format_complex(sep) + ")");
    m.notes.push_back("squarefree check is numerical for complex coefficients (minimum root separation " +
                      format_complex(sep) + ")");
  }

  m.lambda2 = d - 1;
  m.pullback_matrix = IntMatrix(2, 2);
  m.pullback_matrix << 0, d - 1, 1, d - 1;
  m.lift_degree = d - 1;
  secant_tables(p, m.secant_num, m.secant_den);
  if (exact) {
    std::vector<Rational> a;
    for (const auto& c : p) a.push_back(exact_rational(c.real()));
    RatMatrix num, den;
    secant_tables(a, num, den);
    m.exact_secant_num = num;
    m.exact_secant_den = den;
  }

  // Exceptional lines {y = z} for roots z of P, each collapsed to (z, z).
  std::vector<Root> roots = exact_p ? exact_roots(*exact_p) : cluster_roots(polynomial_roots(p), 1e-7);
  for (const auto& r : roots) {
    ExceptionalEntry e;
    e.curve_label = "y = " + format_complex(r.value);
    e.curve_class = make_class<Rational>(m.lattice, {Rational(0), Rational(1)});
    e.image = affine_product_point(r.value, r.value);
    if (exact_p && r.value.imag() == 0.0)
      if (auto q = rational_root_near(*exact_p, r.value.real()))
        e.exact_image = normalized(std::array<Rational, 2>{*q, Rational(1)}, std::array<Rational, 2>{*q, Rational(1)});
    m.exceptional.push_back(e);
  }
  secant_indeterminacy(m, exact_p);
}

void build_torus(SurfaceMapModel& m, const TorusParams& params) {
  m.family = Family::TorusEndo;
  m.lattice = torus_lattice();
  m.torus_real = gaussian_to_real(params.a);
  for (int i = 0; i < 2; ++i)
    if (!std::isfinite(params.v(i).real()) || !std::isfinite(params.v(i).imag()))
      reject("torus_endo: translation v is not finite");
  const Complex det = params.a.determinant();
  const double det2 = std::norm(det);
  if (std::round(det2) == 0.0) reject("torus_endo: det A = 0, the map is not dominant");
  m.lambda2 = static_cast<std::int64_t>(std::llround(det2));
  m.pullback_matrix = hermitian_pullback_matrix(params.a);
  if (m.lambda2 <= m.options.max_torus_cosets)
    m.torus_cosets = lattice_cosets(m.torus_real);
  else
    m.notes.push_back("coset table omitted: |det A|^2 exceeds the enumeration budget");
}

std::array<Rational, 3> unit_vector(int j) {
  std::array<Rational, 3> e{Rational(0), Rational(0), Rational(0)};
  e[static_cast<std::size_t>(j)] = 1;
  return e;
}

HomogeneousTriple<BigInt> compose_range(const std::vector<CremonaFactor>& factors, std::size_t begin,
                                        std::size_t end) {
  HomogeneousTriple<BigInt> t{IntPoly3::variable(0), IntPoly3::variable(1), IntPoly3::variable(2)};
  for (std::size_t i = end; i-- > begin;) t = reduce_triple(compose_triples(factor_triple(factors[i]), t)).components;
  return t;
}

void build_composite(SurfaceMapModel& m, const CremonaParams& params) {
  m.family = Family::CremonaComposite;
  m.lattice = projective_plane_lattice();
  const auto& factors = params.factors;
  if (factors.empty()) reject("cremona_composite: at least one factor is required");
  std::int64_t lambda2 = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.kind == CremonaFactor::Kind::Power) {
      if (f.power < 1 || f.power > 64)
        reject("cremona_composite: factor " + std::to_string(i) + " power must lie in [1, 64]");
      lambda2 *= static_cast<std::int64_t>(f.power) * f.power;
    }
    if (f.kind == CremonaFactor::Kind::Linear) {
      if (f.linear.rows() != 3 || f.linear.cols() != 3)
        reject("cremona_composite: factor " + std::to_string(i) + " linear matrix must be 3x3");
      if (exact_determinant(f.linear) == 0)
        reject("cremona_composite: factor " + std::to_string(i) + " linear matrix is singular");
    }
  }
  m.lambda2 = lambda2;

  const HomogeneousTriple<BigInt> lift = compose_range(factors, 0, factors.size());
  m.lift_degree = lift[0].is_zero() ? (lift[1].is_zero() ? lift[2].total_degree() : lift[1].total_degree())
                                    : lift[0].total_degree();
  m.pullback_matrix = IntMatrix::Constant(1, 1, m.lift_degree);
  m.exact_lift = rational_triple(lift);
  m.lift = complex_triple(*m.exact_lift);
  m.lift_scale = coefficient_scale(*m.lift);

  // I_f candidates: pull each factor's indeterminacy back through the factors
  // applied before it and keep the points where the reduced lift vanishes.
  std::vector<Coords> candidates;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    std::vector<Coords> level = factor_indeterminacy(factors[i]);
    for (std::size_t j = i + 1; j < factors.size() && !level.empty(); ++j) {
      std::vector<Coords> next;
      for (const auto& q : level) {
        bool curve = false;
        for (const auto& w : factor_preimages(factors[j], q, curve)) next.push_back(w.c);
        if (curve) m.indeterminacy_complete = false;
      }
      level = std::move(next);
    }
    candidates.insert(candidates.end(), level.begin(), level.end());
  }
  const bool bare_involution = factors.size() == 1 && factors[0].kind == CremonaFactor::Kind::Involution;
  for (const auto& c : candidates) {
    const ProjPoint p = normalized(c);
    if (sup(eval_lift(*m.lift, p.coords)) > 1e-9 * m.lift_scale) continue;
    bool seen = false;
    for (const auto& e : m.indeterminacy) seen = seen || distance(e.point, SurfacePoint(p)) < 1e-8;
    if (seen) continue;
    IndeterminacyEntry e;
    e.point = p;
    std::array<Rational, 3> r;
    bool rational = true;
    for (int k = 0; k < 3 && rational; ++k) {
      auto q = std::abs(p.coords[k].imag()) < 1e-12 ? snap_rational(p.coords[k].real()) : std::nullopt;
      rational = q.has_value();
      if (q) r[k] = *q;
    }
    if (rational && all_zero(eval_lift(*m.exact_lift, r))) e.exact_point = normalized(r);
    if (bare_involution) e.image_class = make_class<Rational>(m.lattice, {Rational(1)});
    e.note = bare_involution ? "blown up to the opposite coordinate line" : "image curve class unknown";
    m.indeterminacy.push_back(e);
  }
  if (factors.size() > 1) m.indeterminacy_complete = false;

  // Exceptional curves: pullbacks of the coordinate lines contracted by an
  // involution factor, mapped on by the factors applied after it.
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].kind != CremonaFactor::Kind::Involution) continue;
    const auto head = rational_triple(compose_range(factors, 0, i));
    const auto tail = compose_range(factors, i + 1, factors.size());
    const int tail_degree = std::max({tail[0].total_degree(), tail[1].total_degree(), tail[2].total_degree()});
    for (int j = 0; j < 3; ++j) {
      const auto image = eval_lift(head, unit_vector(j));
      if (all_zero(image)) {
        m.exceptional_complete = false;
        continue;
      }
      ExceptionalEntry e;
      const char* names = "xyz";
      e.curve_label = (i + 1 == factors.size() ? std::string("{") : std::string("preimage of {")) + names[j] + "=0}";
      e.curve_class = make_class<Rational>(m.lattice, {Rational(tail_degree)});
      const ExactProjPoint ex = normalized(image);
      e.exact_image = ex;
      e.image = to_float(ExactPoint(ex));
      m.exceptional.push_back(e);
    }
  }
  if (factors.size() > 1) m.exceptional_complete = false;
}

template <typename P>
const P& expect_point(const SurfacePoint& p, const char* what) {
  const P* q = std::get_if<P>(&p);
  if (!q) throw Error(ErrorKind::PreconditionError, std::string(what) + ": point does not lie on the model's surface");
  return *q;
}

}  // namespace

SurfaceMapModel build_model(const ModelParams& params, const ModelOptions& options) {
  SurfaceMapModel m;
  m.params = params;
  m.options = options;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SkewParams>)
          build_skew(m, p);
        else if constexpr (std::is_same_v<T, SecantParams>)
          build_secant(m, p);
        else if constexpr (std::is_same_v<T, TorusParams>)
          build_torus(m, p);
        else
          build_composite(m, p);
      },
      params);
  return m;
}

double lift_residual(const SurfaceMapModel& m, const SurfacePoint& p) {
  switch (m.family) {
    case Family::PolynomialSkew:
    case Family::CremonaComposite: {
      const auto& q = expect_point<ProjPoint>(p, "lift_residual");
      return sup(eval_lift(*m.lift, q.coords)) / m.lift_scale;
    }
    case Family::Secant: {
      const auto& q = expect_point<BiProjPoint>(p, "lift_residual");
      const double s = table_scale(m.secant_num, m.secant_den);
      return std::max(std::abs(bihomogeneous(m.secant_num, q.x, q.y)), std::abs(bihomogeneous(m.secant_den, q.x, q.y))) /
             s;
    }
    case Family::TorusEndo:
      expect_point<TorusPoint>(p, "lift_residual");
      return 1.0;
  }
  return 1.0;
}

SurfacePoint evaluate(const SurfaceMapModel& m, const SurfacePoint& p) {
  const double tol = m.options.indeterminacy_tol;
  switch (m.family) {
    case Family::PolynomialSkew:
    case Family::CremonaComposite: {
      const auto& q = expect_point<ProjPoint>(p, "evaluate");
      const auto image = eval_lift(*m.lift, q.coords);
      if (sup(image) <= tol * m.lift_scale)
        throw Error(ErrorKind::Indeterminate, "evaluate: " + describe(p) + " lies in the indeterminacy set");
      return normalized(image);
    }
    case Family::Secant: {
      const auto& q = expect_point<BiProjPoint>(p, "evaluate");
      const Complex n = bihomogeneous(m.secant_num, q.x, q.y);
      const Complex d = bihomogeneous(m.secant_den, q.x, q.y);
      if (std::max(std::abs(n), std::abs(d)) <= tol * table_scale(m.secant_num, m.secant_den))
        throw Error(ErrorKind::Indeterminate, "evaluate: " + describe(p) + " lies in the indeterminacy set");
      return normalized(q.y, std::array<Complex, 2>{n, d});
    }
    case Family::TorusEndo: {
      const auto& q = expect_point<TorusPoint>(p, "evaluate");
      const auto& t = std::get<TorusParams>(m.params);
      const Eigen::Vector2cd w = t.a * Eigen::Vector2cd(q.z[0], q.z[1]) + t.v;
      return reduced({w(0), w(1)});
    }
  }
  throw Error(ErrorKind::Unsupported, "evaluate: unknown family");
}

bool is_indeterminate_exact(const SurfaceMapModel& m, const ExactPoint& p) {
  if (m.exact_lift) {
    const auto* q = std::get_if<ExactProjPoint>(&p);
    if (!q) throw Error(ErrorKind::PreconditionError, "is_indeterminate_exact: point does not lie on P^2");
    return all_zero(eval_lift(*m.exact_lift, q->coords));
  }
  if (m.exact_secant_num) {
    const auto* q = std::get_if<ExactBiProjPoint>(&p);
    if (!q) throw Error(ErrorKind::PreconditionError, "is_indeterminate_exact: point does not lie on P^1 x P^1");
    return bihomogeneous(*m.exact_secant_num, q->x, q->y) == 0 && bihomogeneous(*m.exact_secant_den, q->x, q->y) == 0;
  }
  throw Error(ErrorKind::Unsupported, "is_indeterminate_exact: model has no exact data");
}

ExactPoint evaluate_exact(const SurfaceMapModel& m, const ExactPoint& p) {
  if (is_indeterminate_exact(m, p))
    throw Error(ErrorKind::Indeterminate, "evaluate_exact: " + describe(p) + " lies in the indeterminacy set");
  if (m.exact_lift) return normalized(eval_lift(*m.exact_lift, std::get<ExactProjPoint>(p).coords));
  const auto& q = std::get<ExactBiProjPoint>(p);
  return normalized(q.y, std::array<Rational, 2>{bihomogeneous(*m.exact_secant_num, q.x, q.y),
                                                 bihomogeneous(*m.exact_secant_den, q.x, q.y)});
}

namespace {

void check_not_critical_image(const SurfaceMapModel& m, const SurfacePoint& p) {
  for (const auto& e : m.exceptional)
    if (distance(e.image, p) < 1e-8)
      throw Error(ErrorKind::PreconditionError, "preimages: " + describe(p) + " is the image of the exceptional curve " +
                                                    e.curve_label + " (a point of I_f^-)");
}

std::vector<Preimage> clustered(const std::vector<std::pair<SurfacePoint, int>>& raw, double radius) {
  std::vector<Preimage> out;
  for (const auto& [p, mult] : raw) {
    bool placed = false;
    for (auto& q : out)
      if (distance(q.point, p) < radius) {
        q.multiplicity += mult;
        placed = true;
        break;
      }
    if (!placed) out.push_back({p, mult});
  }
  return out;
}

void check_finite(const std::vector<Complex>& roots) {
  for (const auto& r : roots)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw Error(ErrorKind::NumericalFailure, "preimages: root finder returned a non-finite root");
}

PreimageResult skew_preimages(const SurfaceMapModel& m, const ProjPoint& target) {
  PreimageResult out;
  const auto& q = std::get<SkewParams>(m.params).q;
  if (target.coords[2] == 0.0) {
    // Off [0:1:0], points at infinity have no preimage outside I_f.
    out.degree_drop = static_cast<int>(m.lambda2);
    return out;
  }
  const Complex a = target.coords[0] / target.coords[2];
  const Complex b = target.coords[1] / target.coords[2];
  // c[i](a) multiplies x^i; a coefficient counts as zero only against the
  // size of its own terms, so large targets far out in the chart keep their degree.
  std::vector<Complex> c(q.size(), 0.0);
  std::vector<double> size(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    Complex acc = 0.0;
    double mag = 0.0;
    for (std::size_t j = q[i].size(); j-- > 0;) {
      acc = acc * a + q[i][j];
      mag = mag * std::abs(a) + std::abs(q[i][j]);
    }
    c[i] = acc;
    size[i] = mag;
  }
  if (c.empty()) {
    c.push_back(0.0);
    size.push_back(0.0);
  }
  c[0] -= b;
  const bool constant_zero = std::abs(c[0]) <= 1e-14 * (size[0] + std::abs(b));
  std::size_t top = std::min(c.size() - 1, static_cast<std::size_t>(m.lambda2));
  while (top > 0 && std::abs(c[top]) <= 1e-14 * size[top]) --top;
  out.degree_drop = static_cast<int>(m.lambda2) - static_cast<int>(top);
  if (top == 0) {
    if (constant_zero)
      throw Error(ErrorKind::PreconditionError, "preimages: fiber over " + describe(SurfacePoint(target)) + " is a curve");
    return out;
  }
  std::vector<Complex> t(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(top) + 1);
  const auto roots = polynomial_roots(t);
  check_finite(roots);
  std::vector<std::pair<SurfacePoint, int>> raw;
  for (const auto& r : cluster_roots(roots, m.options.cluster_radius))
    raw.emplace_back(affine_plane_point(r.value, a), r.multiplicity);
  out.points = clustered(raw, m.options.cluster_radius);
  return out;
}

PreimageResult secant_preimages(const SurfaceMapModel& m, const BiProjPoint& target) {
  PreimageResult out;
  const int mm = static_cast<int>(m.secant_num.rows()) - 1;
  const auto& A = target.x;
  const auto& B = target.y;
  // Coefficient of X0^i X1^(m-i) in B1 * N(X, A) - B0 * D(X, A).
  std::vector<Complex> e(mm + 1, 0.0);
  for (int i = 0; i <= mm; ++i) {
    Complex n = 0.0, d = 0.0;
    for (int j = 0; j <= mm; ++j) {
      const Complex w = std::pow(A[0], j) * std::pow(A[1], mm - j);
      n += m.secant_num(i, j) * w;
      d += m.secant_den(i, j) * w;
    }
    e[i] = B[1] * n - B[0] * d;
  }
  std::vector<Complex> t = trimmed(e, 1e-13);
  if (t.empty())
    throw Error(ErrorKind::PreconditionError, "preimages: fiber over " + describe(SurfacePoint(target)) + " is a curve");
  const int deg = static_cast<int>(t.size()) - 1;
  out.degree_drop = mm - deg;
  std::vector<std::pair<SurfacePoint, int>> raw;
  if (deg >= 1) {
    const auto roots = polynomial_roots(t);
    check_finite(roots);
    for (const auto& r : cluster_roots(roots, m.options.cluster_radius))
      raw.emplace_back(normalized(std::array<Complex, 2>{r.value, 1.0}, A), r.multiplicity);
  }
  if (out.degree_drop > 0) raw.emplace_back(normalized(std::array<Complex, 2>{1.0, 0.0}, A), out.degree_drop);
  std::vector<std::pair<SurfacePoint, int>> kept;
  for (auto& [p, mult] : raw) {
    if (lift_residual(m, p) <= 1e-10) {
      out.discarded_indeterminate += mult;
      continue;
    }
    kept.emplace_back(p, mult);
  }
  out.points = clustered(kept, m.options.cluster_radius);
  return out;
}

PreimageResult torus_preimages(const SurfaceMapModel& m, const TorusPoint& target) {
  if (m.torus_cosets.empty())
    throw Error(ErrorKind::ResourceExceeded, "preimages: coset table exceeds the enumeration budget");
  const auto& t = std::get<TorusParams>(m.params);
  const Matrix<double> inv = m.torus_real.cast<double>().inverse();
  Vector<double> base(4);
  const Complex u0 = target.z[0] - t.v(0), u1 = target.z[1] - t.v(1);
  base << u0.real(), u0.imag(), u1.real(), u1.imag();
  PreimageResult out;
  for (const auto& k : m.torus_cosets) {
    Vector<double> rhs = base;
    for (int i = 0; i < 4; ++i) rhs(i) += static_cast<double>(k[i]);
    const Vector<double> w = inv * rhs;
    out.points.push_back({reduced({Complex(w(0), w(1)), Complex(w(2), w(3))}), 1});
  }
  return out;
}

PreimageResult composite_preimages(const SurfaceMapModel& m, const ProjPoint& target) {
  const auto& factors = std::get<CremonaParams>(m.params).factors;
  std::vector<WeightedCoords> level{{target.coords, 1}};
  PreimageResult out;
  for (const auto& f : factors) {
    std::vector<WeightedCoords> next;
    for (const auto& q : level) {
      bool curve = false;
      for (auto w : factor_preimages(f, q.c, curve)) {
        w.multiplicity *= q.multiplicity;
        next.push_back(w);
      }
      if (curve)
        throw Error(ErrorKind::PreconditionError,
                    "preimages: fiber over " + describe(SurfacePoint(target)) + " contains a contracted curve");
    }
    level = std::move(next);
  }
  std::vector<std::pair<SurfacePoint, int>> kept;
  for (const auto& w : level) {
    const SurfacePoint p = normalized(w.c);
    if (lift_residual(m, p) <= 1e-10) {
      out.discarded_indeterminate += w.multiplicity;
      continue;
    }
    kept.emplace_back(p, w.multiplicity);
  }
  out.points = clustered(kept, m.options.cluster_radius);
  return out;
}

}  // namespace

PreimageResult preimages(const SurfaceMapModel& m, const SurfacePoint& p) {
  check_not_critical_image(m, p);
  switch (m.family) {
    case Family::PolynomialSkew: return skew_preimages(m, expect_point<ProjPoint>(p, "preimages"));
    case Family::Secant: return secant_preimages(m, expect_point<BiProjPoint>(p, "preimages"));
    case Family::TorusEndo: return torus_preimages(m, expect_point<TorusPoint>(p, "preimages"));
    case Family::CremonaComposite: return composite_preimages(m, expect_point<ProjPoint>(p, "preimages"));
  }
  throw Error(ErrorKind::Unsupported, "preimages: unknown family");
}

SurfacePoint random_point(const SurfaceMapModel& m, std::mt19937_64& rng) {
  if (m.family == Family::TorusEndo) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    return reduced({Complex(a, b), Complex(c, d)});
  }
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  const Complex x(a, b), y(c, d);
  if (m.family == Family::Secant) return affine_product_point(x, y);
  return affine_plane_point(x, y);
}

DegreeEstimate topological_degree_mc(const SurfaceMapModel& m, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorKind::PreconditionError, "topological_degree_mc: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  DegreeEstimate out;
  out.n_samples = n_samples;
  int agree = 0;
  for (int s = 0; s < n_samples; ++s) {
    const SurfacePoint p = random_point(m, rng);
    int count = 0;
    try {
      count = static_cast<int>(preimages(m, p).points.size());
    } catch (const Error&) {
      count = -1;
    }
    ++out.histogram[count];
    if (count == m.lambda2) ++agree;
  }
  int best = 0;
  for (const auto& [count, hits] : out.histogram)
    if (hits > best) {
      best = hits;
      out.modal_count = count;
    }
  out.agreement = static_cast<double>(agree) / n_samples;
  out.agrees = out.agreement >= 0.99;
  return out;
}

}  // namespace degreelab
