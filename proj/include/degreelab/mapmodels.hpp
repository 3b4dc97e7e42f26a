#pragma once

// Parameterized families of meromorphic surface maps: point evaluation,
// preimage solving, topological degree and the declared indeterminacy and
// exceptional data of each family.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "degreelab/exact.hpp"
#include "degreelab/lattice.hpp"
#include "degreelab/multipoly.hpp"
#include "degreelab/points.hpp"

namespace degreelab {

enum class Family { PolynomialSkew, Secant, TorusEndo, CremonaComposite };

std::string_view to_string(Family family);

/// f(x, y) = (y, Q(x, y)) on P^2; q[i][j] is the coefficient of x^i y^j.
struct SkewParams {
  std::vector<std::vector<Complex>> q;
};

/// Secant method of P on P^1 x P^1; p[k] is the coefficient of z^k.
struct SecantParams {
  std::vector<Complex> p;
};

/// Torus C^2 / Z[i]^2 with z -> A z + v; A has Gaussian-integer entries.
struct TorusParams {
  Eigen::Matrix2cd a = Eigen::Matrix2cd::Identity();
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
};

/// A factor of a composite plane map.
struct CremonaFactor {
  enum class Kind { Involution, Power, Linear };
  Kind kind = Kind::Involution;
  int power = 2;     // Power: [x^k : y^k : z^k]
  RatMatrix linear;  // Linear: invertible 3x3
};

/// f = factors[0] o factors[1] o ... (the last factor is applied first).
struct CremonaParams {
  std::vector<CremonaFactor> factors;
};

using ModelParams = std::variant<SkewParams, SecantParams, TorusParams, CremonaParams>;

struct ModelOptions {
  double cluster_radius = 1e-7;
  /// Relative threshold below which all lift components count as vanishing.
  double indeterminacy_tol = 1e-12;
  std::int64_t max_torus_cosets = 1000000;
};

struct IndeterminacyEntry {
  SurfacePoint point;
  std::optional<ExactPoint> exact_point;
  /// Class of the curve the point blows up to; empty when unknown.
  std::optional<ExactClass> image_class;
  std::string note;
};

struct ExceptionalEntry {
  std::string curve_label;
  ExactClass curve_class;
  SurfacePoint image;
  std::optional<ExactPoint> exact_image;
};

struct SurfaceMapModel {
  Family family = Family::PolynomialSkew;
  ModelParams params;
  ModelOptions options;

  std::int64_t lambda2 = 1;
  IntMatrix pullback_matrix;
  LatticeRef lattice;

  std::vector<IndeterminacyEntry> indeterminacy;
  bool indeterminacy_complete = true;
  std::vector<ExceptionalEntry> exceptional;
  bool exceptional_complete = true;
  std::vector<std::string> notes;

  // Plane families: homogeneous lift [F0 : F1 : F2] of degree lift_degree.
  std::optional<HomogeneousTriple<Complex>> lift;
  std::optional<HomogeneousTriple<Rational>> exact_lift;
  int lift_degree = 0;
  double lift_scale = 1.0;

  // Secant: R = num / den after cancelling x - y; num(i, j) multiplies x^i y^j.
  Matrix<Complex> secant_num;
  Matrix<Complex> secant_den;
  std::optional<RatMatrix> exact_secant_num;
  std::optional<RatMatrix> exact_secant_den;

  // Torus: real 4x4 form of A on (Re z1, Im z1, Re z2, Im z2) and coset
  // representatives of Z[i]^2 / A Z[i]^2.
  IntMatrix torus_real;
  std::vector<std::array<std::int64_t, 4>> torus_cosets;

  bool has_exact_data() const { return exact_lift.has_value() || exact_secant_num.has_value(); }
  std::vector<ExactClass> exceptional_image_classes() const;
};

/// Validates the family invariants and populates every derived table.
/// Throws ModelRejected with a certificate when an invariant fails.
SurfaceMapModel build_model(const ModelParams& params, const ModelOptions& options = {});

/// Image point, renormalized. Throws Indeterminate on I_f.
SurfacePoint evaluate(const SurfaceMapModel& m, const SurfacePoint& p);

/// Exact image of a rational point; requires exact model data.
ExactPoint evaluate_exact(const SurfaceMapModel& m, const ExactPoint& p);

/// Components of the (normalized) lift at p, as a sup norm relative to the
/// coefficient scale. Zero means p is indeterminate.
double lift_residual(const SurfaceMapModel& m, const SurfacePoint& p);
bool is_indeterminate_exact(const SurfaceMapModel& m, const ExactPoint& p);

struct Preimage {
  SurfacePoint point;
  int multiplicity = 1;
};

struct PreimageResult {
  std::vector<Preimage> points;
  int degree_drop = 0;
  int discarded_indeterminate = 0;
  int total_multiplicity() const;
};

/// Preimages with multiplicities. Throws PreconditionError when p lies in
/// I_f^- and NumericalFailure when root finding fails.
PreimageResult preimages(const SurfaceMapModel& m, const SurfacePoint& p);

/// Random point of the model's surface (affine box [-2,2]^2 or the torus
/// fundamental domain).
SurfacePoint random_point(const SurfaceMapModel& m, std::mt19937_64& rng);

struct DegreeEstimate {
  int modal_count = 0;
  int n_samples = 0;
  double agreement = 0.0;  // fraction of samples with count == lambda2
  bool agrees = false;     // agreement >= 0.99
  std::map<int, int> histogram;
};

DegreeEstimate topological_degree_mc(const SurfaceMapModel& m, int n_samples, std::uint64_t seed);

/// Hermite-normal-form coset representatives of Z^4 / M Z^4.
std::vector<std::array<std::int64_t, 4>> lattice_cosets(const IntMatrix& m);

/// Real 4x4 integer form of a Gaussian-integer 2x2 matrix.
IntMatrix gaussian_to_real(const Eigen::Matrix2cd& a);

}  // namespace degreelab
