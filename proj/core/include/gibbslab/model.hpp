#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gibbslab/simplex.hpp"
#include "gibbslab/state_space.hpp"

namespace gibbslab {

/// Separable interaction: H(z) = sum_k h(k, z_k). Each callback receives the
/// coordinate index and the scalar argument. h must be concave and C^2.
struct Interaction {
  std::function<double(int, double)> value;
  std::function<double(int, double)> d1;
  std::function<double(int, double)> d2;
};

/// Model parameters: spin count q, interaction exponent r, inverse
/// temperature beta, and the separable interaction. The single-spin
/// distribution is uniform on q symbols throughout.
class ModelSpec {
 public:
  /// Generalized Curie-Weiss-Potts family: h(t) = -t^r / r, r >= 2.
  static ModelSpec gcwp(int q, double r, double beta);

  /// Custom separable concave interaction. r is kept as metadata only.
  static ModelSpec custom(int q, double beta, Interaction interaction,
                          double r = 2.0);

  int q() const { return q_; }
  double r() const { return r_; }
  double beta() const { return beta_; }
  bool is_gcwp() const { return gcwp_; }

  double h(int k, double t) const;
  double dh(int k, double t) const;
  double d2h(int k, double t) const;

  ModelSpec with_beta(double beta) const;

 private:
  ModelSpec(int q, double r, double beta, bool gcwp, Interaction interaction);

  int q_;
  double r_;
  double beta_;
  bool gcwp_;
  Interaction interaction_;  // empty callbacks for the GCWP fast path
};

/// H(z) = sum_k h(k, z_k).
double hamiltonian(const ModelSpec& model, const SimplexPoint& z);
double hamiltonian(const ModelSpec& model, std::span<const double> z);

/// log((1/q) sum_k exp(z_k)), max-subtracted.
double log_mgf(int q, std::span<const double> z);

/// g_k(z) = softmax_k(-beta * dH(z)): the simplex self-map driving both the
/// dynamics expansion and the contraction conditions.
SimplexPoint g_function(const ModelSpec& model, const SimplexPoint& z);
void g_function_into(const ModelSpec& model, std::span<const double> z,
                     std::span<double> out);

/// Directional derivative (d/ds) g(y + s * dir) at s = 0, one entry per
/// coordinate of g. Analytic for any separable interaction.
std::vector<double> g_directional_derivative(const ModelSpec& model,
                                             std::span<const double> y,
                                             std::span<const double> dir);

/// Relative entropy R(nu | rho); terms with nu_k = 0 contribute 0.
double relative_entropy(const SimplexPoint& nu, const SimplexPoint& rho);

/// I_beta(z) = R(z|rho) + beta H(z) - min_value, with rho uniform.
double rate_function(const ModelSpec& model, const SimplexPoint& z,
                     double min_value);

/// Free energy functional G_beta(z) = beta (-H)*(-grad H(z)) - Gamma(-beta grad H(z)).
/// The Legendre conjugate is computed coordinate-wise: closed form for GCWP,
/// golden-section maximization on an adaptive bracket otherwise.
double free_energy(const ModelSpec& model, const SimplexPoint& z);

/// Exact Gibbs distribution of the spin-count vector on P_n, in state-space
/// index order. Computed in log space.
struct GibbsWeights {
  std::shared_ptr<const StateSpace> states;
  std::vector<double> prob;

  double prob_of(const LatticePoint& point) const;
};

GibbsWeights gibbs_weights(const ModelSpec& model, std::int64_t n);

}  // namespace gibbslab
