#pragma once

// Torus endomorphisms: Lyapunov exponents, the exponent sum rule, exact Haar
// invariance on finite grids and Jacobian constancy.

#include <cstdint>
#include <string>
#include <vector>

#include "degreelab/mapmodels.hpp"

namespace degreelab {

enum class ExponentMethod { MonteCarloQR, ExactEigen };

std::string_view to_string(ExponentMethod method);

struct ExponentReport {
  double chi_plus = 0.0;
  double chi_minus = 0.0;
  ExponentMethod method = ExponentMethod::ExactEigen;
  int n_steps = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

struct LyapunovResult {
  ExponentReport monte_carlo;
  ExponentReport exact;
  /// Eigenvalue moduli of A differ; tolerance assertions apply only then.
  bool hyperbolic = false;
  double max_deviation = 0.0;  // |MC - exact| over both exponents
};

/// Throws Unsupported for non-torus models.
LyapunovResult lyapunov_exponents(const SurfaceMapModel& m, int n_steps, int n_samples, std::uint64_t seed);

struct SumCheck {
  double lhs = 0.0;  // chi+ + chi-
  double rhs = 0.0;  // 1/2 log lambda2
  double tolerance = 0.0;
  bool pass = false;
};

SumCheck exponent_sum_check(const ExponentReport& r, double lambda2);

struct HaarReport {
  int n = 0;
  std::int64_t points = 0;
  std::int64_t distinct_images = 0;
  std::int64_t min_fiber = 0;
  std::int64_t max_fiber = 0;
  bool bijective = false;
};

/// Counts images of the grid (N^-1 Z[i]^2) / Z[i]^2 under z -> A z + v.
/// Requires gcd(|det A|^2, N) = 1 and N v in Z[i]^2.
HaarReport haar_invariance_check(const SurfaceMapModel& m, int n);

struct JacobianReport {
  int samples = 0;
  double min_value = 0.0;  // min over samples of |det Df|^2
  double max_value = 0.0;
  double relative_variation = 0.0;
  bool constant = false;  // relative variation below 1e-10
  bool equals_lambda2 = false;
  bool structurally_constant = false;  // holds for every torus endomorphism
  std::string note;
};

JacobianReport jacobian_constancy(const SurfaceMapModel& m, int samples, std::uint64_t seed);

}  // namespace degreelab
