#include "gibbslab/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gibbslab/numeric.hpp"

namespace gibbslab {

ModelSpec::ModelSpec(int q, double r, double beta, bool gcwp, Interaction interaction)
    : q_(q), r_(r), beta_(beta), gcwp_(gcwp), interaction_(std::move(interaction)) {}

ModelSpec ModelSpec::gcwp(int q, double r, double beta) {
  if (q < 2) throw std::invalid_argument("ModelSpec: q must be >= 2");
  if (!(r >= 2.0)) throw std::invalid_argument("ModelSpec: r must be >= 2");
  if (!(beta >= 0.0)) throw std::invalid_argument("ModelSpec: beta must be >= 0");
  return ModelSpec(q, r, beta, true, Interaction{});
}

ModelSpec ModelSpec::custom(int q, double beta, Interaction interaction, double r) {
  if (q < 2) throw std::invalid_argument("ModelSpec: q must be >= 2");
  if (!(beta >= 0.0)) throw std::invalid_argument("ModelSpec: beta must be >= 0");
  if (!interaction.value || !interaction.d1 || !interaction.d2)
    throw std::invalid_argument("ModelSpec: custom interaction needs value, d1 and d2");
  for (int k = 0; k < q; ++k)
    if (!std::isfinite(interaction.value(k, 1.0 / q)))
      throw std::invalid_argument(
          "ModelSpec: interaction is not finite at the uniform point");
  return ModelSpec(q, r, beta, false, std::move(interaction));
}

double ModelSpec::h(int k, double t) const {
  if (gcwp_) return -std::pow(t, r_) / r_;
  return interaction_.value(k, t);
}

double ModelSpec::dh(int k, double t) const {
  if (gcwp_) return -std::pow(t, r_ - 1.0);
  return interaction_.d1(k, t);
}

double ModelSpec::d2h(int k, double t) const {
  if (gcwp_) return -(r_ - 1.0) * std::pow(t, r_ - 2.0);
  return interaction_.d2(k, t);
}

ModelSpec ModelSpec::with_beta(double beta) const {
  ModelSpec copy = *this;
  if (!(beta >= 0.0)) throw std::invalid_argument("with_beta: beta must be >= 0");
  copy.beta_ = beta;
  return copy;
}

double hamiltonian(const ModelSpec& model, std::span<const double> z) {
  double s = 0.0;
  for (int k = 0; k < model.q(); ++k) s += model.h(k, z[static_cast<std::size_t>(k)]);
  return s;
}

double hamiltonian(const ModelSpec& model, const SimplexPoint& z) {
  if (z.q() != model.q()) throw std::invalid_argument("hamiltonian: arity mismatch");
  return hamiltonian(model, z.span());
}

double log_mgf(int q, std::span<const double> z) {
  if (static_cast<int>(z.size()) != q)
    throw std::invalid_argument("log_mgf: arity mismatch");
  return log_sum_exp(z) - std::log(static_cast<double>(q));
}

void g_function_into(const ModelSpec& model, std::span<const double> z,
                     std::span<double> out) {
  const int q = model.q();
  for (int k = 0; k < q; ++k)
    out[static_cast<std::size_t>(k)] =
        -model.beta() * model.dh(k, z[static_cast<std::size_t>(k)]);
  softmax_inplace(out);
}

SimplexPoint g_function(const ModelSpec& model, const SimplexPoint& z) {
  if (z.q() != model.q()) throw std::invalid_argument("g_function: arity mismatch");
  std::vector<double> out(static_cast<std::size_t>(model.q()));
  g_function_into(model, z.span(), out);
  return SimplexPoint(std::move(out));
}

std::vector<double> g_directional_derivative(const ModelSpec& model,
                                             std::span<const double> y,
                                             std::span<const double> dir) {
  const int q = model.q();
  if (static_cast<int>(y.size()) != q || static_cast<int>(dir.size()) != q)
    throw std::invalid_argument("g_directional_derivative: arity mismatch");
  std::vector<double> g(static_cast<std::size_t>(q));
  g_function_into(model, y, g);
  // Argument of the softmax is a_k = -beta h_k'(y_k); its directional
  // derivative is w_k = -beta h_k''(y_k) dir_k, and
  // (d/ds) g_k = g_k (w_k - <g, w>).
  std::vector<double> w(static_cast<std::size_t>(q));
  double gw = 0.0;
  for (int k = 0; k < q; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    w[i] = -model.beta() * model.d2h(k, y[i]) * dir[i];
    gw += g[i] * w[i];
  }
  std::vector<double> out(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    out[i] = g[i] * (w[i] - gw);
  }
  return out;
}

double relative_entropy(const SimplexPoint& nu, const SimplexPoint& rho) {
  if (nu.q() != rho.q()) throw std::invalid_argument("relative_entropy: arity mismatch");
  double s = 0.0;
  for (int k = 0; k < nu.q(); ++k) {
    const double nk = nu[k];
    if (nk == 0.0) continue;  // 0 log 0 = 0
    const double rk = rho[k];
    if (rk == 0.0)
      throw std::invalid_argument("relative_entropy: nu charges a rho-null symbol");
    s += nk * std::log(nk / rk);
  }
  return s;
}

double rate_function(const ModelSpec& model, const SimplexPoint& z,
                     double min_value) {
  return relative_entropy(z, SimplexPoint::uniform(model.q())) +
         model.beta() * hamiltonian(model, z) - min_value;
}

namespace {

// Coordinate-wise Legendre conjugate of -h_k at s: sup_x { x s + h_k(x) }.
double conjugate_1d(const ModelSpec& model, int k, double s) {
  if (model.is_gcwp()) {
    // Conjugate of t^r / r is s^{r'} / r', r' = r/(r-1), for s >= 0.
    if (s <= 0.0) return 0.0;
    const double rp = model.r() / (model.r() - 1.0);
    return std::pow(s, rp) / rp;
  }
  // Adaptive bracket: grow [-B, B] until the derivative s + h'(x) changes sign
  // (h concave makes it decreasing), then golden-section maximize.
  double B = 1.0;
  const auto slope = [&](double x) { return s + model.dh(k, x); };
  while (slope(-B) <= 0.0 || slope(B) >= 0.0) {
    B *= 2.0;
    if (B > 1e8)
      throw std::runtime_error(
          "free_energy: conjugate bracketing failed (non-coercive interaction)");
  }
  const double x = golden_max([&](double t) { return t * s + model.h(k, t); },
                              -B, B, 1e-12);
  return x * s + model.h(k, x);
}

}  // namespace

double free_energy(const ModelSpec& model, const SimplexPoint& z) {
  if (z.q() != model.q()) throw std::invalid_argument("free_energy: arity mismatch");
  const int q = model.q();
  double conj = 0.0;
  std::vector<double> arg(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    const double s = -model.dh(k, z[k]);  // component of -grad H(z)
    conj += conjugate_1d(model, k, s);
    arg[static_cast<std::size_t>(k)] = model.beta() * s;
  }
  return model.beta() * conj - log_mgf(q, arg);
}

double GibbsWeights::prob_of(const LatticePoint& point) const {
  return prob[states->index(point.counts())];
}

GibbsWeights gibbs_weights(const ModelSpec& model, std::int64_t n) {
  auto states = std::make_shared<const StateSpace>(model.q(), n);
  const std::size_t size = states->size();
  const int q = model.q();
  const double log_q = std::log(static_cast<double>(q));
  std::vector<double> logw(size);
  std::vector<double> z(static_cast<std::size_t>(q));
  const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t i = 0; i < size; ++i) {
    const auto counts = states->state(i);
    double lw = lg_n - static_cast<double>(n) * log_q;
    for (int k = 0; k < q; ++k) {
      const std::size_t j = static_cast<std::size_t>(k);
      lw -= std::lgamma(static_cast<double>(counts[j]) + 1.0);
      z[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
    }
    lw -= model.beta() * static_cast<double>(n) * hamiltonian(model, z);
    logw[i] = lw;
  }
  const double lse = log_sum_exp(logw);
  GibbsWeights gw;
  gw.states = std::move(states);
  gw.prob.resize(size);
  for (std::size_t i = 0; i < size; ++i) gw.prob[i] = std::exp(logw[i] - lse);
  return gw;
}

}  // namespace gibbslab
