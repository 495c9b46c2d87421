#pragma once

#include "gibbslab/model.hpp"
#include "gibbslab/simplex.hpp"

namespace gibbslab {

enum class Phase { unique, multiple };

/// Equilibrium macrostate solve: global minimizer of R(.|rho) + beta H(.)
/// over the simplex, with the scalar order parameter u of the asymmetric
/// candidate u e^1 + (1-u)/q (1,...,1).
struct EquilibriumSolution {
  SimplexPoint z_beta;
  double u;
  double min_value;
  Phase phase;
};

struct EquilibriaOptions {
  /// Cross-validate the candidate comparison by barycentric grid search plus
  /// local descent. Required for custom interactions; rejects q > 4 grids.
  bool grid_cross_validate = true;
  /// 0 selects the default resolution (200 for q <= 3, 60 for q = 4).
  int grid_resolution = 0;
  /// Worker count for the grid scan (data parallel over grid slices).
  int threads = 1;
};

/// Delta(u) = -(beta/q^{r-1}) [ (1+(q-1)u)^{r-1} - (1-u)^{r-1} ].
double mean_field_delta(const ModelSpec& model, double u);

/// Largest u in [0,1) with u = (1 - e^{Delta(u)}) / (1 + (q-1) e^{Delta(u)}).
/// Dense residual scan followed by bisection; 0 when no positive solution.
double solve_mean_field(const ModelSpec& model);

/// f(z(u)) - f(uniform) along the asymmetric candidate family, evaluated in a
/// cancellation-aware form (negative iff the asymmetric state wins).
double candidate_value_gap(int q, double r, double beta, double u);

EquilibriumSolution find_equilibria(const ModelSpec& model,
                                    const EquilibriaOptions& options = {});

/// Equilibrium phase-transition point: the beta at which the free energies of
/// the uniform state and the asymmetric candidate cross. Bisection to 1e-8.
double find_beta_c(int q, double r);

/// Rapid-mixing threshold: sup of beta such that g_k(z) < z_k whenever
/// z_k > 1/q. Evaluated on the one-dimensional worst-case family
/// z = (z_1, (1-z_1)/(q-1), ...) by dense scan with local refinement.
double find_beta_s(int q, double r);

}  // namespace gibbslab
