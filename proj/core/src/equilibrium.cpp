#include "gibbslab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gibbslab/numeric.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {

double mean_field_delta(const ModelSpec& model, double u) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("mean_field_delta: u must lie in [0, 1]");
  const double q = static_cast<double>(model.q());
  const double rm1 = model.r() - 1.0;
  // (1+(q-1)u)^{r-1} - (1-u)^{r-1}, kept accurate near u = 0.
  const double plus = std::expm1(rm1 * std::log1p((q - 1.0) * u));
  const double minus = (u < 1.0) ? std::expm1(rm1 * std::log1p(-u)) : -1.0;
  return -model.beta() / std::pow(q, rm1) * (plus - minus);
}

namespace {

double mean_field_residual(const ModelSpec& model, double u) {
  const double q = static_cast<double>(model.q());
  const double em = std::expm1(mean_field_delta(model, u));
  return u + em / (q + (q - 1.0) * em);
}

}  // namespace

double solve_mean_field(const ModelSpec& model) {
  if (!model.is_gcwp())
    throw std::invalid_argument("solve_mean_field: GCWP models only");
  constexpr int kScan = 10'000;
  double root = 0.0;  // u = 0 always solves the equation
  double prev_u = 1.0 / kScan;
  double prev_f = mean_field_residual(model, prev_u);
  if (prev_f == 0.0) root = prev_u;
  for (int i = 2; i <= kScan; ++i) {
    const double u = static_cast<double>(i) / kScan;
    const double f = mean_field_residual(model, u);
    if (f == 0.0) {
      root = u;
    } else if ((prev_f < 0.0) != (f < 0.0) && prev_f != 0.0) {
      root = bisect_root([&](double t) { return mean_field_residual(model, t); },
                         prev_u, u, 1e-12);
    }
    prev_u = u;
    prev_f = f;
  }
  return root;
}

double candidate_value_gap(int q, double r, double beta, double u) {
  const double qd = static_cast<double>(q);
  const double a = (qd - 1.0) * u;
  const double z1 = (1.0 + a) / qd;
  const double z2 = (1.0 - u) / qd;
  double ent = z1 * std::log1p(a);
  if (z2 > 0.0) ent += (qd - 1.0) * z2 * std::log1p(-u);
  // H(z(u)) - H(uniform) = -(1/r) q^{-r} [ ((1+a)^r - 1) + (q-1)((1-u)^r - 1) ]
  const double p1 = std::expm1(r * std::log1p(a));
  const double p2 = (u < 1.0) ? std::expm1(r * std::log1p(-u)) : -1.0;
  const double hdiff = -(p1 + (qd - 1.0) * p2) * std::pow(qd, -r) / r;
  return ent + beta * hdiff;
}

namespace {

SimplexPoint candidate_point(int q, double u) {
  std::vector<double> z(static_cast<std::size_t>(q),
                        (1.0 - u) / static_cast<double>(q));
  z[0] = (1.0 + (static_cast<double>(q) - 1.0) * u) / static_cast<double>(q);
  return SimplexPoint(std::move(z));
}

double objective(const ModelSpec& model, std::span<const double> z) {
  const int q = model.q();
  double ent = 0.0;
  for (int k = 0; k < q; ++k) {
    const double zk = z[static_cast<std::size_t>(k)];
    if (zk > 0.0) ent += zk * std::log(zk * static_cast<double>(q));
  }
  return ent + model.beta() * hamiltonian(model, z);
}

// Pattern search on the simplex along +/- (e_i - e_j) moves. Minimizes f.
std::vector<double> refine_min_on_simplex(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> z, double step, double step_tol) {
  const int q = static_cast<int>(z.size());
  double best = f(z);
  while (step > step_tol) {
    bool improved = false;
    for (int i = 0; i < q && !improved; ++i) {
      for (int j = 0; j < q && !improved; ++j) {
        if (i == j) continue;
        if (z[static_cast<std::size_t>(j)] < step) continue;
        std::vector<double> trial = z;
        trial[static_cast<std::size_t>(i)] += step;
        trial[static_cast<std::size_t>(j)] -= step;
        const double v = f(trial);
        if (v < best - 1e-15) {
          best = v;
          z = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return z;
}

// Barycentric grid minimum of f, data-parallel over the first coordinate.
// Each slice reduces to its own (min, argmin); the final reduction runs in
// slice order, so the result does not depend on the thread count.
std::pair<double, std::vector<double>> grid_minimum(
    int q, int resolution, int threads,
    const std::function<double(std::span<const double>)>& f) {
  std::vector<double> slice_min(static_cast<std::size_t>(resolution) + 1, 0.0);
  std::vector<std::vector<double>> slice_arg(static_cast<std::size_t>(resolution) + 1);
  parallel_for(static_cast<std::size_t>(resolution) + 1, threads, [&](std::size_t c0) {
    std::vector<std::int64_t> parts(static_cast<std::size_t>(q), 0);
    parts[0] = static_cast<std::int64_t>(c0);
    std::vector<double> z(static_cast<std::size_t>(q));
    double best = 0.0;
    std::vector<double> best_z;
    bool first = true;
    const std::function<void(int, std::int64_t)> rec = [&](int pos,
                                                           std::int64_t left) {
      if (pos == q - 1) {
        parts[static_cast<std::size_t>(pos)] = left;
        for (int k = 0; k < q; ++k)
          z[static_cast<std::size_t>(k)] =
              static_cast<double>(parts[static_cast<std::size_t>(k)]) / resolution;
        const double v = f(z);
        if (first || v < best) {
          first = false;
          best = v;
          best_z = z;
        }
        return;
      }
      for (std::int64_t c = 0; c <= left; ++c) {
        parts[static_cast<std::size_t>(pos)] = c;
        rec(pos + 1, left - c);
      }
    };
    rec(1, resolution - static_cast<std::int64_t>(c0));
    slice_min[c0] = best;
    slice_arg[c0] = std::move(best_z);
  });
  std::size_t arg = 0;
  for (std::size_t c0 = 1; c0 < slice_min.size(); ++c0)
    if (slice_min[c0] < slice_min[arg]) arg = c0;
  return {slice_min[arg], slice_arg[arg]};
}

}  // namespace

EquilibriumSolution find_equilibria(const ModelSpec& model,
                                    const EquilibriaOptions& options) {
  const int q = model.q();
  int resolution = options.grid_resolution;
  if (resolution == 0) resolution = (q <= 3) ? 200 : 60;
  if (options.grid_cross_validate && q > 4)
    throw std::invalid_argument(
        "find_equilibria: grid cross-validation is limited to q <= 4; disable "
        "it for larger q");

  EquilibriumSolution out{SimplexPoint::uniform(q), 0.0, 0.0, Phase::unique};
  const double f_uniform = objective(model, out.z_beta.span());
  out.min_value = f_uniform;

  if (model.is_gcwp()) {
    const double u = solve_mean_field(model);
    if (u > 1e-12) {
      const double gap = candidate_value_gap(q, model.r(), model.beta(), u);
      if (gap < -1e-10) {
        // The asymmetric candidate wins; its orbit under coordinate
        // permutations makes the minimizer set degenerate.
        out.z_beta = candidate_point(q, u);
        out.u = u;
        out.min_value = f_uniform + gap;
        out.phase = Phase::multiple;
      } else if (gap <= 1e-10) {
        out.u = u;
        out.phase = Phase::multiple;
      }
    }
  }

  if (options.grid_cross_validate || !model.is_gcwp()) {
    const auto f = [&](std::span<const double> z) { return objective(model, z); };
    auto [grid_min, grid_argmin] = grid_minimum(q, resolution, options.threads, f);
    if (f_uniform < grid_min) {
      grid_min = f_uniform;
      grid_argmin = SimplexPoint::uniform(q).coords();
    }
    grid_argmin =
        refine_min_on_simplex(f, std::move(grid_argmin), 1.0 / resolution, 1e-9);
    grid_min = objective(model, grid_argmin);

    if (!model.is_gcwp()) {
      const double gap = grid_min - f_uniform;
      if (gap < -1e-10) {
        out.z_beta = SimplexPoint(grid_argmin);
        out.min_value = grid_min;
        out.phase = Phase::multiple;
      } else if (gap <= 1e-10 && l1_diff(grid_argmin, out.z_beta.span()) > 1e-6) {
        out.phase = Phase::multiple;
      }
      double umax = 0.0;
      for (double zk : grid_argmin)
        umax = std::max(umax, (static_cast<double>(q) * zk - 1.0) /
                                  (static_cast<double>(q) - 1.0));
      out.u = std::max(0.0, umax);
    } else if (grid_min < out.min_value - 1e-8) {
      throw std::runtime_error(
          "find_equilibria: grid search undercut the candidate comparison; "
          "mean-field solve is inconsistent");
    }
  }
  return out;
}

double find_beta_c(int q, double r) {
  if (q < 2 || !(r >= 2.0)) throw std::invalid_argument("find_beta_c: bad (q, r)");
  const auto asym_wins = [&](double beta) {
    const ModelSpec m = ModelSpec::gcwp(q, r, beta);
    const double u = solve_mean_field(m);
    if (u <= 1e-12) return false;
    return candidate_value_gap(q, r, beta, u) < 0.0;
  };
  double hi = std::pow(static_cast<double>(q), r - 1.0) / (r - 1.0) + 1.0;
  while (!asym_wins(hi)) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("find_beta_c: no transition located");
  }
  double lo = 1e-9;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (asym_wins(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Sign-definite reformulation of g_1(z) - z_1 on the equal-split family
// z = (z_1, (1-z_1)/(q-1), ...): the excess is negative iff
//   phi(z_1) = log(z_1/z_2) - beta (z_1^{r-1} - z_2^{r-1}) > 0.
// Both terms vanish linearly at z_1 = 1/q, so each is computed via
// log1p/expm1 to keep the sign trustworthy arbitrarily close to the boundary.
double boundary_phi(int q, double r, double beta, double z1) {
  const double z2 = (1.0 - z1) / (static_cast<double>(q) - 1.0);
  if (z2 <= 0.0) return std::numeric_limits<double>::infinity();
  const double L = std::log1p((z1 - z2) / z2);  // log(z_1/z_2)
  const double pow_gap = std::pow(z2, r - 1.0) * std::expm1((r - 1.0) * L);
  return L - beta * pow_gap;
}

// min over z_1 in (1/q, 1] of phi; the model contracts iff the min is > 0.
double min_phi(int q, double r, double beta) {
  const auto phi = [&](double z1) { return boundary_phi(q, r, beta, z1); };
  constexpr int kScan = 10'000;
  const double lo = 1.0 / static_cast<double>(q);
  const double h = (1.0 - lo) / kScan;
  std::vector<double> vals(kScan + 1,
                           std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kScan; ++i) {
    vals[static_cast<std::size_t>(i)] = phi(lo + i * h);
    best = std::min(best, vals[static_cast<std::size_t>(i)]);
  }
  int refined = 0;
  for (int i = 1; i <= kScan && refined < 8; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    const double left = (i > 1) ? vals[static_cast<std::size_t>(i - 1)] : v + 1.0;
    const double right = (i < kScan) ? vals[static_cast<std::size_t>(i + 1)] : v + 1.0;
    if (v <= left && v <= right) {
      const double a = lo + (i - 1) * h;
      const double b = lo + std::min<std::int64_t>(kScan, i + 1) * h;
      const double x = golden_max([&](double t) { return -phi(t); }, a, b, 1e-13);
      best = std::min(best, phi(x));
      ++refined;
    }
  }
  return best;
}

}  // namespace

double find_beta_s(int q, double r) {
  if (q < 2 || !(r >= 2.0)) throw std::invalid_argument("find_beta_s: bad (q, r)");
  const auto contracts = [&](double beta) { return min_phi(q, r, beta) > 0.0; };
  double hi = std::pow(static_cast<double>(q), r - 1.0) / (r - 1.0) + 1.0;
  while (contracts(hi)) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("find_beta_s: no threshold located");
  }
  double lo = 1e-9;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (contracts(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gibbslab
