#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gibbslab/model.hpp"
#include "gibbslab/simplex.hpp"

namespace gibbslab {

/// Coordinate-monotone sequence of simplex points on the straight segment
/// between two endpoints, with every step of l1 length in [epsilon, 2 epsilon).
struct MonotonePath {
  std::vector<SimplexPoint> points;
  double epsilon = 0.0;

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

/// Equal subdivision of the segment from a to b; the residual short step is
/// absorbed into its predecessor. Requires a != b unless allow_empty.
MonotonePath build_monotone_path(const SimplexPoint& a, const SimplexPoint& b,
                                 double epsilon, bool allow_empty = false);

/// Aggregate variation of g along the straight segment from a to b:
/// sum_k integral of |d/dt g_k(a + t(b-a))| dt, by adaptive quadrature with
/// the integrand's sign changes located first.
double aggregate_variation_quadrature(const ModelSpec& model,
                                      const SimplexPoint& a,
                                      const SimplexPoint& b);

/// GCWP closed form of the aggregate variation along the segment from the
/// uniform point to z: 2 sum_{k: z_k > 1/q} (g_k(z(t_k^*)) - 1/q), with t_k^*
/// the unique interior critical point of g_k along the segment (1 if none).
double aggregate_variation_closed_form(const ModelSpec& model,
                                       const SimplexPoint& z);

struct ConditionReport {
  std::string condition;
  bool holds = false;
  double sup_ratio = 0.0;
  std::optional<std::vector<double>> argmax;
  double beta = 0.0;
  int q = 0;
  double r = 0.0;
  std::optional<double> epsilon;
  std::optional<int> grid_resolution;
  /// GCWP closed-form value of the local contraction ratio, when applicable.
  std::optional<double> analytic;
};

/// Global contraction of the aggregate variation: sup over a barycentric grid
/// (plus local ascent refinement) of D(z, z_beta) / ||z - z_beta||_1, a ball
/// of radius 1e-4 around z_beta excluded. Holds iff the sup is < 1.
ConditionReport check_condition_contraction(const ModelSpec& model,
                                            int grid_resolution,
                                            int threads = 1);

/// Discrete Riemann-sum version along monotone paths with steps in
/// [epsilon, 2 epsilon). Holds iff the sup over grid endpoints is < 1.
ConditionReport check_condition_riemann(const ModelSpec& model, double epsilon,
                                        int grid_resolution, int threads = 1);

/// Local contraction ratio at z_beta, estimated on shrinking spheres and
/// extrapolated; for GCWP the analytic value beta (r-1) / q^{r-1} is attached.
ConditionReport check_condition_local(const ModelSpec& model);

}  // namespace gibbslab
