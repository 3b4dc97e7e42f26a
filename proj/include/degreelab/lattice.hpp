#pragma once

// Linear algebra on the real (1,1) cohomology of a surface: the intersection
// pairing, adjoint pushforward, spectral analysis of pullback matrices and
// the push-pull identities at the level of classes.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "degreelab/errors.hpp"
#include "degreelab/exact.hpp"
#include "degreelab/polynomial.hpp"

namespace degreelab {

enum class NefRule { ProjectivePlane, Bidegree, HermitianPsd, CustomHalfspaces };

std::string_view to_string(NefRule rule);

struct IntersectionLattice {
  std::string name;
  int rank = 0;
  IntMatrix gram;
  std::vector<std::string> basis_labels;
  NefRule nef_rule = NefRule::CustomHalfspaces;
  /// Custom rule only: a class a is nef iff h . a >= -tol for every row h.
  std::vector<Vector<double>> halfspaces;
  /// Reference Kaehler class used for normalizations.
  RatVector kahler;
};

using LatticeRef = std::shared_ptr<const IntersectionLattice>;

/// P^2: rank 1, gram [1], basis the line class H.
LatticeRef projective_plane_lattice();
/// P^1 x P^1: basis (x = const, y = const), gram [[0,1],[1,0]].
LatticeRef product_lattice();
/// Complex 2-torus: classes are 2x2 Hermitian matrices with coordinates
/// (h11, Re h12, Im h12, h22); the pairing polarizes the determinant.
LatticeRef torus_lattice();
LatticeRef custom_lattice(IntMatrix gram, std::vector<std::string> labels,
                          std::vector<Vector<double>> halfspaces, RatVector kahler);

template <typename Scalar>
struct CohomClass {
  Vector<Scalar> coords;
  LatticeRef lattice;
};

using ExactClass = CohomClass<Rational>;
using RealClass = CohomClass<double>;

template <typename Scalar>
CohomClass<Scalar> make_class(const LatticeRef& lattice, std::initializer_list<Scalar> coords) {
  Vector<Scalar> v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const auto& c : coords) v(i++) = c;
  return {std::move(v), lattice};
}

RealClass to_real(const ExactClass& c);
ExactClass kahler_class(const LatticeRef& lattice);

/// a^T G b over the lattice's gram matrix.
template <typename Scalar>
Scalar pair(const IntersectionLattice& lattice, const Vector<Scalar>& a, const Vector<Scalar>& b) {
  if (a.size() != lattice.rank || b.size() != lattice.rank)
    throw Error(ErrorKind::DimensionMismatch, "pair: class dimension does not match lattice rank " +
                                                  std::to_string(lattice.rank));
  Scalar acc = Scalar(0);
  for (int i = 0; i < lattice.rank; ++i)
    for (int j = 0; j < lattice.rank; ++j) {
      if (lattice.gram(i, j) == 0) continue;
      acc += a(i) * Scalar(lattice.gram(i, j)) * b(j);
    }
  return acc;
}

template <typename Scalar>
Scalar pair(const CohomClass<Scalar>& a, const CohomClass<Scalar>& b) {
  if (!a.lattice || !b.lattice)
    throw Error(ErrorKind::DimensionMismatch, "pair: class without lattice");
  if (a.lattice != b.lattice && a.lattice->gram != b.lattice->gram)
    throw Error(ErrorKind::DimensionMismatch, "pair: classes live in different lattices");
  return pair(*a.lattice, a.coords, b.coords);
}

/// M_* = G^{-1} M^T G, the adjoint of M for the intersection pairing.
RatMatrix adjoint_pushforward(const RatMatrix& pull, const IntersectionLattice& lattice);
RatMatrix adjoint_pushforward(const IntMatrix& pull, const IntersectionLattice& lattice);

struct SpectralReport {
  double r1 = 0.0;
  IntPoly char_poly;
  bool simple_root = false;
  int r1_multiplicity = 0;
  RealClass alpha;
  bool alpha_nef = false;
  double second_modulus = 0.0;
  double sqrt_lambda2 = 0.0;
  bool sqrt_lambda2_bound_ok = false;
  std::vector<Root> eigenvalues;
};

/// Spectral radius, simplicity certificate, normalized eigenclass and the
/// subleading-modulus bound. The eigenclass is scaled so <alpha, omega> = 1.
/// Throws HypothesisViolation when r1^2 <= lambda2 or when the spectral
/// radius is not a positive real eigenvalue.
SpectralReport spectral_analysis(const RatMatrix& m, const Rational& lambda2, const LatticeRef& lattice,
                                 const RealClass& omega, double tol = 1e-9);
SpectralReport spectral_analysis(const RatMatrix& m, const Rational& lambda2, const LatticeRef& lattice,
                                 double tol = 1e-9);

/// All eigenvalues with exact multiplicities (via the characteristic polynomial).
std::vector<Root> exact_eigenvalues(const RatMatrix& m);

struct InvariantClasses {
  RealClass alpha_plus;
  RealClass alpha_minus;
  double cross_pairing = 0.0;
  bool cross_pairing_positive = false;
  SpectralReport pull;
  SpectralReport push;
};

InvariantClasses invariant_classes(const RatMatrix& pull, const Rational& lambda2, const LatticeRef& lattice,
                                   const RealClass& omega, double tol = 1e-9);

/// M_* M - lambda2 Id. Vanishes exactly when no curve is contracted at the
/// level of classes.
RatMatrix pushpull_defect(const RatMatrix& pull, const IntersectionLattice& lattice, const Rational& lambda2);

struct ExpansionForm {
  RatMatrix form;
  double min_eigenvalue = 0.0;
  bool positive_semidefinite = false;
};

/// Q = M^T G M - lambda2 G with its smallest eigenvalue.
ExpansionForm pullback_expansion_form(const RatMatrix& pull, const IntersectionLattice& lattice,
                                      const Rational& lambda2, double tol = 1e-9);

bool nef_member(const IntersectionLattice& lattice, const Vector<double>& coords, double tol = 1e-9);
bool nef_member(const RealClass& c, double tol = 1e-9);

// Torus helpers: Hermitian matrices <-> lattice coordinates.
Eigen::Matrix2cd hermitian_from_coords(const Vector<double>& coords);
Vector<double> coords_from_hermitian(const Eigen::Matrix2cd& h);

/// Matrix of H -> A^* H A on torus coordinates for a Gaussian-integer A.
IntMatrix hermitian_pullback_matrix(const Eigen::Matrix2cd& a);

}  // namespace degreelab
