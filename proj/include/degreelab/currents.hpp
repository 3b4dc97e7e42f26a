#pragma once

// Green potentials of the invariant currents: the pullback series g_n^+ with
// tail bounds, the pushforward series g_n^- over preimage trees, and grids.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "degreelab/mapmodels.hpp"

namespace degreelab {

/// First dynamical degree used by the potentials: the lift degree on P^2,
/// the spectral radius of the pullback matrix on the torus.
double potential_lambda1(const SurfaceMapModel& m);

/// gamma+(p) = (1/delta) * 1/2 * log(|F(p)|^2 / |p|^(2 delta)) with p the
/// unit sup-norm lift and Euclidean norms; identically 0 on the torus.
double gamma_plus(const SurfaceMapModel& m, const SurfacePoint& p);

struct GreenEvaluation {
  double value = 0.0;
  int n_used = 0;
  double tail_bound = 0.0;
  bool orbit_hit_indeterminacy = false;
  double gamma_sup = 0.0;        // sup of |gamma+| over the observed orbit
  std::vector<double> partials;  // g_1, ..., g_n_used
};

/// Partial sums of sum_j lambda1^-j gamma+(f^j p), stopping when the tail
/// bound drops below tol or after n_max terms.
GreenEvaluation green_plus(const SurfaceMapModel& m, const SurfacePoint& p, double tol, int n_max);

struct ResidualReport {
  double residual = 0.0;
  int used = 0;
  int skipped = 0;
};

/// max |g+(f p) - lambda1 (g+(p) - gamma+(p))| over the samples whose orbits
/// avoid I_f.
ResidualReport functional_equation_residual(const SurfaceMapModel& m, const std::vector<SurfacePoint>& samples,
                                            double tol, int n_max);

/// Chart potential u: 1/2 log(1 + |x|^2 + |y|^2) in the affine chart, 0 on the torus.
double chart_potential(const SurfaceMapModel& m, const SurfacePoint& p);

struct ScalingLevel {
  int level = 0;
  double observed = 0.0;  // lambda1^-j (f^j_* c)(p)
  double expected = 0.0;  // (lambda2 / lambda1)^j c
};

struct GreenMinusEvaluation {
  double value = 0.0;            // g_n^-(p)
  std::vector<double> partials;  // g_1^-, ..., g_n^-
  int n_used = 0;
  std::size_t leaves = 0;
  bool partial = false;         // tree truncated by a point of I_f^-
  bool critical_value = false;  // a preimage with multiplicity > 1 was met
  double gamma_max = 0.0;       // C: max of gamma- over the tree nodes used
  std::vector<double> adjusted; // g_k^- - C sum_{i<k} (lambda2/lambda1)^i
  bool monotone = true;         // adjusted sequence is non-increasing
  std::vector<ScalingLevel> constant_scaling;
};

/// g_n^-(p) = sum_{j<n} lambda1^-j (f^j_* gamma-)(p) over the preimage tree,
/// with gamma- = lambda1^-1 f_* u - u. The tree is capped at max_leaves.
GreenMinusEvaluation green_minus_partial(const SurfaceMapModel& m, const SurfacePoint& p, int n,
                                         double constant = 1.0, std::size_t max_leaves = 100000);

struct GridSlice {
  // point(s, t) = origin + s * u + t * v on the affine chart (or torus cover)
  std::array<Complex, 2> origin{0.0, 0.0};
  std::array<Complex, 2> u{1.0, 0.0};
  std::array<Complex, 2> v{0.0, 1.0};
  std::array<double, 2> s_range{-2.0, 2.0};
  std::array<double, 2> t_range{-2.0, 2.0};
};

enum class GreenWhich { Plus, Minus };

struct GridOptions {
  double tol = 1e-9;
  int n_max = 40;  // terms for plus, tree depth for minus
};

struct GreenGrid {
  GridSlice slice;
  int nx = 0;
  int ny = 0;
  GreenWhich which = GreenWhich::Plus;
  GridOptions options;
  std::vector<double> values;  // row-major: index = j * nx + i
  std::vector<bool> mask;      // true where the cell is indeterminate

  double s_at(int i) const;
  double t_at(int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

SurfacePoint slice_point(const SurfaceMapModel& m, const GridSlice& slice, double s, double t);

GreenGrid export_grid(const SurfaceMapModel& m, const GridSlice& slice, int nx, int ny, GreenWhich which,
                      const GridOptions& options = {});

/// CSV with header x,y,value; masked cells are written as NaN.
void write_grid_csv(const GreenGrid& grid, std::ostream& out);

std::string format_double(double x);

}  // namespace degreelab
