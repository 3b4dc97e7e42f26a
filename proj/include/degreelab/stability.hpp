#pragma once

// Orbit test for 1-stability and the exact degree-sequence oracle.

#include <optional>
#include <string>
#include <vector>

#include "degreelab/mapmodels.hpp"

namespace degreelab {

struct StabilityOptions {
  double membership_tol = 1e-8;
  /// Exact orbits switch to floating point beyond this coordinate size.
  std::size_t max_exact_bits = 4096;
};

struct OrbitEntry {
  int seed = 0;  // index into the model's exceptional table
  int n = 0;
  SurfacePoint point;
  bool exact = false;
  bool hit_indeterminacy = false;
};

struct StabilityReport {
  int horizon = 0;
  std::vector<OrbitEntry> orbit_log;
  std::optional<int> collision_step;
  double membership_tol = 0.0;
  std::vector<std::string> notes;

  bool stable_up_to_horizon() const { return !collision_step.has_value(); }
  /// "NoObstructionUpTo(N)" or "CollisionAt(n)".
  std::string verdict() const;
};

/// Iterates every point of f(E_f) forward n = 0..N steps and tests membership
/// in I_f. A clean verdict only covers the horizon.
StabilityReport check_one_stability(const SurfaceMapModel& m, int horizon, const StabilityOptions& options = {});

struct DegreeSequence {
  std::vector<int> degrees;
  std::vector<int> naive_degrees;
  bool symbolic = true;
};

/// Degrees of the reduced homogeneous lifts of f, f^2, ..., f^n_max.
/// Throws Unsupported without exact plane data, PreconditionError when a
/// composed degree would exceed max_degree and ResourceExceeded when the
/// monomial budget is exhausted.
DegreeSequence symbolic_degree_sequence(const SurfaceMapModel& m, int n_max, std::size_t max_terms = 1000000,
                                        int max_degree = 200);

/// Degrees predicted by powers of the pullback matrix on the hyperplane class.
std::vector<long long> matrix_degree_prediction(const SurfaceMapModel& m, int n_max);

struct Lambda1Estimate {
  double estimate = 0.0;  // last ratio degrees[n] / degrees[n-1]
  double nth_root = 0.0;  // degrees[n]^(1/n)
  bool consistent_with(double r1, double rel = 0.1) const;
};

Lambda1Estimate lambda1_estimate(const DegreeSequence& ds);

}  // namespace degreelab
