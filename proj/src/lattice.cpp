#include "degreelab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace degreelab {

std::string_view to_string(NefRule rule) {
  switch (rule) {
    case NefRule::ProjectivePlane: return "P2-nonneg";
    case NefRule::Bidegree: return "bidegree-nonneg";
    case NefRule::HermitianPsd: return "hermitian-psd";
    case NefRule::CustomHalfspaces: return "custom-halfspaces";
  }
  return "unknown";
}

namespace {

RatVector rat_vector(std::initializer_list<long> values) {
  RatVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (long x : values) v(i++) = Rational(x);
  return v;
}

}  // namespace

LatticeRef projective_plane_lattice() {
  static const LatticeRef lattice = [] {
    auto l = std::make_shared<IntersectionLattice>();
    l->name = "P2";
    l->rank = 1;
    l->gram = IntMatrix::Constant(1, 1, 1);
    l->basis_labels = {"H"};
    l->nef_rule = NefRule::ProjectivePlane;
    l->kahler = rat_vector({1});
    return l;
  }();
  return lattice;
}

LatticeRef product_lattice() {
  static const LatticeRef lattice = [] {
    auto l = std::make_shared<IntersectionLattice>();
    l->name = "P1xP1";
    l->rank = 2;
    l->gram = IntMatrix(2, 2);
    l->gram << 0, 1, 1, 0;
    l->basis_labels = {"x=const", "y=const"};
    l->nef_rule = NefRule::Bidegree;
    l->kahler = rat_vector({1, 1});
    return l;
  }();
  return lattice;
}

LatticeRef torus_lattice() {
  static const LatticeRef lattice = [] {
    auto l = std::make_shared<IntersectionLattice>();
    l->name = "torus";
    l->rank = 4;
    // <H,K> = det(H+K) - det H - det K = a e' + a' e - 2 (b b' + c c').
    l->gram = IntMatrix::Zero(4, 4);
    l->gram(0, 3) = 1;
    l->gram(3, 0) = 1;
    l->gram(1, 1) = -2;
    l->gram(2, 2) = -2;
    l->basis_labels = {"h11", "re h12", "im h12", "h22"};
    l->nef_rule = NefRule::HermitianPsd;
    l->kahler = rat_vector({1, 0, 0, 1});
    return l;
  }();
  return lattice;
}

LatticeRef custom_lattice(IntMatrix gram, std::vector<std::string> labels, std::vector<Vector<double>> halfspaces,
                          RatVector kahler) {
  if (gram.rows() != gram.cols() || gram.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "custom_lattice: gram must be square and nonempty");
  if (gram != gram.transpose()) throw Error(ErrorKind::DimensionMismatch, "custom_lattice: gram must be symmetric");
  auto l = std::make_shared<IntersectionLattice>();
  l->name = "custom";
  l->rank = static_cast<int>(gram.rows());
  l->gram = std::move(gram);
  l->basis_labels = std::move(labels);
  l->nef_rule = NefRule::CustomHalfspaces;
  l->halfspaces = std::move(halfspaces);
  l->kahler = std::move(kahler);
  return l;
}

RealClass to_real(const ExactClass& c) { return {to_double(RatMatrix(c.coords)).col(0), c.lattice}; }

ExactClass kahler_class(const LatticeRef& lattice) { return {lattice->kahler, lattice}; }

RatMatrix adjoint_pushforward(const RatMatrix& pull, const IntersectionLattice& lattice) {
  if (pull.rows() != lattice.rank || pull.cols() != lattice.rank)
    throw Error(ErrorKind::DimensionMismatch, "adjoint_pushforward: matrix size does not match lattice rank");
  const RatMatrix gram = to_rational(lattice.gram);
  RatMatrix gram_inverse;
  if (!exact_inverse(gram, gram_inverse))
    throw Error(ErrorKind::SingularGram, "adjoint_pushforward: gram matrix is singular");
  return gram_inverse * pull.transpose() * gram;
}

RatMatrix adjoint_pushforward(const IntMatrix& pull, const IntersectionLattice& lattice) {
  return adjoint_pushforward(to_rational(pull), lattice);
}

std::vector<Root> exact_eigenvalues(const RatMatrix& m) { return exact_roots(characteristic_polynomial(m)); }

namespace {

Vector<double> null_vector(const Matrix<double>& m, double eigenvalue) {
  const Eigen::Index n = m.rows();
  const Matrix<double> shifted = m - eigenvalue * Matrix<double>::Identity(n, n);
  Eigen::JacobiSVD<Matrix<double>> svd(shifted, Eigen::ComputeFullV);
  return svd.matrixV().col(n - 1);
}

}  // namespace

SpectralReport spectral_analysis(const RatMatrix& m, const Rational& lambda2, const LatticeRef& lattice,
                                 const RealClass& omega, double tol) {
  if (m.rows() != lattice->rank || m.cols() != lattice->rank)
    throw Error(ErrorKind::DimensionMismatch, "spectral_analysis: matrix size does not match lattice rank");
  SpectralReport report;
  report.char_poly = characteristic_polynomial(m);
  report.eigenvalues = exact_roots(report.char_poly);
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const Root& a, const Root& b) { return std::abs(a.value) > std::abs(b.value); });

  const Root& leading = report.eigenvalues.front();
  const double radius = std::abs(leading.value);
  const double lambda2_value = to_double(lambda2);
  report.sqrt_lambda2 = std::sqrt(lambda2_value);

  if (leading.value.imag() != 0.0 || leading.value.real() <= 0.0)
    throw Error(ErrorKind::HypothesisViolation,
                "spectral_analysis: spectral radius is not attained by a positive real eigenvalue");
  if (radius * radius <= lambda2_value * (1.0 + 1e-12))
    throw Error(ErrorKind::HypothesisViolation,
                "spectral_analysis: r1^2 = " + std::to_string(radius * radius) +
                    " does not exceed lambda2 = " + std::to_string(lambda2_value));

  report.r1 = leading.value.real();
  report.r1_multiplicity = leading.multiplicity;
  report.simple_root = leading.multiplicity == 1;

  // Remaining spectrum, counting the leading root again if it is repeated.
  double second = 0.0;
  if (leading.multiplicity > 1) second = radius;
  for (std::size_t i = 1; i < report.eigenvalues.size(); ++i)
    second = std::max(second, std::abs(report.eigenvalues[i].value));
  report.second_modulus = second;
  report.sqrt_lambda2_bound_ok = second <= report.sqrt_lambda2 + tol;

  Vector<double> v = null_vector(to_double(m), report.r1);
  const double scale = pair(*lattice, v, omega.coords);
  if (std::abs(scale) < tol)
    throw Error(ErrorKind::StructuralFailure, "spectral_analysis: leading eigenclass is orthogonal to omega");
  report.alpha = RealClass{v / scale, lattice};
  report.alpha_nef = nef_member(report.alpha, tol);
  return report;
}

SpectralReport spectral_analysis(const RatMatrix& m, const Rational& lambda2, const LatticeRef& lattice,
                                 double tol) {
  return spectral_analysis(m, lambda2, lattice, to_real(kahler_class(lattice)), tol);
}

InvariantClasses invariant_classes(const RatMatrix& pull, const Rational& lambda2, const LatticeRef& lattice,
                                   const RealClass& omega, double tol) {
  InvariantClasses out;
  out.pull = spectral_analysis(pull, lambda2, lattice, omega, tol);
  out.push = spectral_analysis(adjoint_pushforward(pull, *lattice), lambda2, lattice, omega, tol);
  out.alpha_plus = out.pull.alpha;
  out.alpha_minus = out.push.alpha;
  out.cross_pairing = pair(out.alpha_plus, out.alpha_minus);
  out.cross_pairing_positive = out.cross_pairing > tol;
  return out;
}

RatMatrix pushpull_defect(const RatMatrix& pull, const IntersectionLattice& lattice, const Rational& lambda2) {
  const RatMatrix push = adjoint_pushforward(pull, lattice);
  return push * pull - lambda2 * RatMatrix::Identity(pull.rows(), pull.cols());
}

ExpansionForm pullback_expansion_form(const RatMatrix& pull, const IntersectionLattice& lattice,
                                      const Rational& lambda2, double tol) {
  if (pull.rows() != lattice.rank || pull.cols() != lattice.rank)
    throw Error(ErrorKind::DimensionMismatch, "pullback_expansion_form: matrix size does not match lattice rank");
  const RatMatrix gram = to_rational(lattice.gram);
  ExpansionForm out;
  out.form = pull.transpose() * gram * pull - lambda2 * gram;
  Eigen::SelfAdjointEigenSolver<Matrix<double>> solver(to_double(out.form), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  out.positive_semidefinite = out.min_eigenvalue >= -tol;
  return out;
}

bool nef_member(const IntersectionLattice& lattice, const Vector<double>& coords, double tol) {
  if (coords.size() != lattice.rank) throw Error(ErrorKind::DimensionMismatch, "nef_member: wrong class dimension");
  switch (lattice.nef_rule) {
    case NefRule::ProjectivePlane:
    case NefRule::Bidegree:
      return coords.minCoeff() >= -tol;
    case NefRule::HermitianPsd: {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(hermitian_from_coords(coords), Eigen::EigenvaluesOnly);
      return solver.eigenvalues().minCoeff() >= -tol;
    }
    case NefRule::CustomHalfspaces: {
      if (lattice.halfspaces.empty())
        throw Error(ErrorKind::Unsupported, "nef_member: custom lattice has no halfspace data");
      for (const auto& h : lattice.halfspaces)
        if (h.dot(coords) < -tol) return false;
      return true;
    }
  }
  return false;
}

bool nef_member(const RealClass& c, double tol) { return nef_member(*c.lattice, c.coords, tol); }

Eigen::Matrix2cd hermitian_from_coords(const Vector<double>& coords) {
  if (coords.size() != 4) throw Error(ErrorKind::DimensionMismatch, "hermitian_from_coords: expected 4 coordinates");
  Eigen::Matrix2cd h;
  h << Complex(coords(0), 0.0), Complex(coords(1), coords(2)), Complex(coords(1), -coords(2)),
      Complex(coords(3), 0.0);
  return h;
}

Vector<double> coords_from_hermitian(const Eigen::Matrix2cd& h) {
  Vector<double> v(4);
  v << h(0, 0).real(), h(0, 1).real(), h(0, 1).imag(), h(1, 1).real();
  return v;
}

IntMatrix hermitian_pullback_matrix(const Eigen::Matrix2cd& a) {
  IntMatrix out(4, 4);
  for (int j = 0; j < 4; ++j) {
    Vector<double> e = Vector<double>::Zero(4);
    e(j) = 1.0;
    const Eigen::Matrix2cd image = a.adjoint() * hermitian_from_coords(e) * a;
    const Vector<double> c = coords_from_hermitian(image);
    for (int i = 0; i < 4; ++i) {
      const double rounded = std::round(c(i));
      if (std::abs(rounded - c(i)) > 1e-9)
        throw Error(ErrorKind::ModelRejected, "hermitian_pullback_matrix: A must have Gaussian-integer entries");
      out(i, j) = static_cast<std::int64_t>(rounded);
    }
  }
  return out;
}

}  // namespace degreelab
