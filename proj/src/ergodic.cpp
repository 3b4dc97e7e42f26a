#include "degreelab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "degreelab/errors.hpp"

namespace degreelab {

std::string_view to_string(ExponentMethod method) {
  return method == ExponentMethod::MonteCarloQR ? "MonteCarloQR" : "ExactEigen";
}

namespace {

const TorusParams& torus_params(const SurfaceMapModel& m, const char* what) {
  if (m.family != Family::TorusEndo)
    throw Error(ErrorKind::Unsupported, std::string(what) + ": only torus endomorphisms are supported");
  return std::get<TorusParams>(m.params);
}

}  // namespace

LyapunovResult lyapunov_exponents(const SurfaceMapModel& m, int n_steps, int n_samples, std::uint64_t seed) {
  const auto& t = torus_params(m, "lyapunov_exponents");
  if (n_steps < 100) throw Error(ErrorKind::PreconditionError, "lyapunov_exponents: n_steps must be >= 100");
  if (n_samples < 1) throw Error(ErrorKind::PreconditionError, "lyapunov_exponents: n_samples must be >= 1");
  LyapunovResult out;

  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(t.a, false);
  double l0 = std::log(std::abs(solver.eigenvalues()(0)));
  double l1 = std::log(std::abs(solver.eigenvalues()(1)));
  if (l0 < l1) std::swap(l0, l1);
  out.exact = {l0, l1, ExponentMethod::ExactEigen, 0, 0, seed};
  out.hyperbolic = std::abs(l0 - l1) > 1e-9;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double sum0 = 0.0, sum1 = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    // Df is constant, so the Haar-random start only enters through the frame.
    const SurfacePoint start = random_point(m, rng);
    (void)start;
    Eigen::Matrix2cd q;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) q(i, j) = Complex(gauss(rng), gauss(rng));
    q = Eigen::HouseholderQR<Eigen::Matrix2cd>(q).householderQ();
    double acc0 = 0.0, acc1 = 0.0;
    for (int k = 0; k < n_steps; ++k) {
      Eigen::HouseholderQR<Eigen::Matrix2cd> qr(t.a * q);
      const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
      acc0 += std::log(std::abs(r(0, 0)));
      acc1 += std::log(std::abs(r(1, 1)));
      q = qr.householderQ();
    }
    sum0 += acc0 / n_steps;
    sum1 += acc1 / n_steps;
  }
  out.monte_carlo = {sum0 / n_samples, sum1 / n_samples, ExponentMethod::MonteCarloQR, n_steps, n_samples, seed};
  if (out.monte_carlo.chi_plus < out.monte_carlo.chi_minus)
    std::swap(out.monte_carlo.chi_plus, out.monte_carlo.chi_minus);
  out.max_deviation = std::max(std::abs(out.monte_carlo.chi_plus - out.exact.chi_plus),
                               std::abs(out.monte_carlo.chi_minus - out.exact.chi_minus));
  return out;
}

SumCheck exponent_sum_check(const ExponentReport& r, double lambda2) {
  SumCheck out;
  out.lhs = r.chi_plus + r.chi_minus;
  out.rhs = 0.5 * std::log(lambda2);
  out.tolerance = r.method == ExponentMethod::ExactEigen ? 1e-6 : 1e-3;
  out.pass = std::abs(out.lhs - out.rhs) < out.tolerance;
  return out;
}

HaarReport haar_invariance_check(const SurfaceMapModel& m, int n) {
  const auto& t = torus_params(m, "haar_invariance_check");
  if (n < 1 || n > 64) throw Error(ErrorKind::PreconditionError, "haar_invariance_check: N must lie in [1, 64]");
  if (std::gcd(m.lambda2, static_cast<std::int64_t>(n)) != 1)
    throw Error(ErrorKind::PreconditionError,
                "haar_invariance_check: gcd(|det A|^2, N) = " +
                    std::to_string(std::gcd(m.lambda2, static_cast<std::int64_t>(n))) +
                    " != 1, so A is singular mod N and maps the N-torsion grid onto a proper subgroup; "
                    "the uniform grid measure is then not preserved");
  std::array<std::int64_t, 4> shift{};
  for (int i = 0; i < 2; ++i) {
    const Complex w = t.v(i) * static_cast<double>(n);
    const double re = std::round(w.real()), im = std::round(w.imag());
    if (std::abs(re - w.real()) > 1e-9 || std::abs(im - w.imag()) > 1e-9)
      throw Error(ErrorKind::PreconditionError, "haar_invariance_check: N v must be a Gaussian-integer vector");
    shift[2 * i] = static_cast<std::int64_t>(re);
    shift[2 * i + 1] = static_cast<std::int64_t>(im);
  }
  auto mod = [n](std::int64_t x) { return ((x % n) + n) % n; };
  const std::int64_t total = static_cast<std::int64_t>(n) * n * n * n;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(total), 0);
  std::array<std::int64_t, 4> k{};
  for (k[0] = 0; k[0] < n; ++k[0])
    for (k[1] = 0; k[1] < n; ++k[1])
      for (k[2] = 0; k[2] < n; ++k[2])
        for (k[3] = 0; k[3] < n; ++k[3]) {
          std::int64_t index = 0;
          for (int i = 0; i < 4; ++i) {
            std::int64_t c = shift[i];
            for (int j = 0; j < 4; ++j) c += m.torus_real(i, j) * k[j];
            index = index * n + mod(c);
          }
          ++hits[static_cast<std::size_t>(index)];
        }
  HaarReport out;
  out.n = n;
  out.points = total;
  out.distinct_images = std::count_if(hits.begin(), hits.end(), [](std::int64_t h) { return h > 0; });
  const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
  out.min_fiber = *lo;
  out.max_fiber = *hi;
  out.bijective = out.min_fiber == 1 && out.max_fiber == 1;
  return out;
}

namespace {

// |det Df|^2 in the affine chart by central differences of the holomorphic
// map (x, y) -> f(x, y).
double numeric_jacobian(const SurfaceMapModel& m, Complex x, Complex y) {
  auto chart = [&](Complex a, Complex b) {
    const SurfacePoint p = m.family == Family::Secant ? SurfacePoint(affine_product_point(a, b))
                                                      : SurfacePoint(affine_plane_point(a, b));
    const auto c = affine_coords(evaluate(m, p));
    if (!c) throw Error(ErrorKind::NumericalFailure, "jacobian_constancy: image left the affine chart");
    return *c;
  };
  const double h = 1e-6;
  const auto xp = chart(x + h, y), xm = chart(x - h, y), yp = chart(x, y + h), ym = chart(x, y - h);
  const Complex a = (xp[0] - xm[0]) / (2 * h), b = (yp[0] - ym[0]) / (2 * h);
  const Complex c = (xp[1] - xm[1]) / (2 * h), d = (yp[1] - ym[1]) / (2 * h);
  return std::norm(a * d - b * c);
}

}  // namespace

JacobianReport jacobian_constancy(const SurfaceMapModel& m, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::PreconditionError, "jacobian_constancy: samples must be >= 1");
  std::mt19937_64 rng(seed);
  JacobianReport out;
  out.samples = samples;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const SurfacePoint p = random_point(m, rng);
    double value = 0.0;
    if (m.family == Family::TorusEndo) {
      value = std::norm(std::get<TorusParams>(m.params).a.determinant());
    } else if (m.family == Family::PolynomialSkew) {
      // det D(y, Q) = -dQ/dx
      const auto a = *affine_coords(p);
      const auto& q = std::get<SkewParams>(m.params).q;
      Complex dq = 0.0;
      for (std::size_t i = 1; i < q.size(); ++i)
        for (std::size_t j = 0; j < q[i].size(); ++j)
          dq += q[i][j] * static_cast<double>(i) * std::pow(a[0], static_cast<int>(i - 1)) *
                std::pow(a[1], static_cast<int>(j));
      value = std::norm(dq);
    } else {
      const auto a = *affine_coords(p);
      value = numeric_jacobian(m, a[0], a[1]);
    }
    out.min_value = std::min(out.min_value, value);
    out.max_value = std::max(out.max_value, value);
  }
  out.relative_variation = (out.max_value - out.min_value) / std::max(1.0, std::abs(out.max_value));
  out.constant = out.relative_variation < 1e-10;
  out.equals_lambda2 = out.constant && std::abs(out.max_value - static_cast<double>(m.lambda2)) <
                                           1e-10 * std::max(1.0, static_cast<double>(m.lambda2));
  out.structurally_constant = m.family == Family::TorusEndo;
  out.note = out.structurally_constant
                 ? "Df = A is constant"
                 : (out.constant ? "constant on the samples but not structurally constant for this family"
                                 : "Jacobian varies, as expected outside Kodaira dimension zero");
  return out;
}

}  // namespace degreelab
