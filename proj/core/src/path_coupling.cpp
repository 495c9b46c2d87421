#include "gibbslab/path_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gibbslab/equilibrium.hpp"
#include "gibbslab/numeric.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {

MonotonePath build_monotone_path(const SimplexPoint& a, const SimplexPoint& b,
                                 double epsilon, bool allow_empty) {
  if (a.q() != b.q()) throw std::invalid_argument("build_monotone_path: arity mismatch");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("build_monotone_path: epsilon must be > 0");
  const double length = l1_distance(a, b);
  MonotonePath path;
  path.epsilon = epsilon;
  if (length == 0.0) {
    if (allow_empty) {
      path.points = {a};
      return path;
    }
    throw std::invalid_argument("build_monotone_path: endpoints coincide");
  }
  // Equal steps of length L/k with k = floor(L/eps): each step lands in
  // [eps, 2 eps) and the residual is folded into the final step. The 1e-9
  // nudge keeps exact multiples of eps from rounding down.
  const std::int64_t k = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(length / epsilon + 1e-9));
  const int q = a.q();
  path.points.reserve(static_cast<std::size_t>(k) + 1);
  path.points.push_back(a);
  for (std::int64_t i = 1; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k);
    std::vector<double> z(static_cast<std::size_t>(q));
    for (int c = 0; c < q; ++c)
      z[static_cast<std::size_t>(c)] = (1.0 - t) * a[c] + t * b[c];
    path.points.emplace_back(std::move(z));
  }
  path.points.push_back(b);
  return path;
}

namespace {

std::vector<double> segment_point(const SimplexPoint& a, const SimplexPoint& b,
                                  double t) {
  std::vector<double> y(static_cast<std::size_t>(a.q()));
  for (int k = 0; k < a.q(); ++k)
    y[static_cast<std::size_t>(k)] = (1.0 - t) * a[k] + t * b[k];
  return y;
}

// d/dt g_k(a + t (b - a)) for every k.
std::vector<double> segment_derivative(const ModelSpec& model,
                                       const SimplexPoint& a,
                                       const SimplexPoint& b, double t) {
  const std::vector<double> y = segment_point(a, b, t);
  std::vector<double> dir(static_cast<std::size_t>(a.q()));
  for (int k = 0; k < a.q(); ++k) dir[static_cast<std::size_t>(k)] = b[k] - a[k];
  return g_directional_derivative(model, y, dir);
}

}  // namespace

double aggregate_variation_quadrature(const ModelSpec& model,
                                      const SimplexPoint& a,
                                      const SimplexPoint& b) {
  if (a.q() != model.q() || b.q() != model.q())
    throw std::invalid_argument("aggregate_variation: arity mismatch");
  if (l1_distance(a, b) == 0.0) return 0.0;
  if (model.beta() == 0.0) return 0.0;  // g is constant
  const int q = model.q();
  constexpr int kScan = 256;

  double total = 0.0;
  for (int k = 0; k < q; ++k) {
    const auto deriv = [&](double t) {
      return segment_derivative(model, a, b, t)[static_cast<std::size_t>(k)];
    };
    // Locate the interior sign changes so each smooth piece carries a
    // constant sign and can be integrated without the |.| kink.
    std::vector<double> cuts{0.0};
    double prev_t = 0.0;
    double prev_v = deriv(0.0);
    for (int i = 1; i <= kScan; ++i) {
      const double t = static_cast<double>(i) / kScan;
      const double v = deriv(t);
      if (prev_v != 0.0 && v != 0.0 && (prev_v < 0.0) != (v < 0.0))
        cuts.push_back(bisect_root(deriv, prev_t, t, 1e-13));
      prev_t = t;
      prev_v = v;
    }
    cuts.push_back(1.0);
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double lo = cuts[piece], hi = cuts[piece + 1];
      if (hi <= lo) continue;
      total += std::abs(adaptive_simpson(deriv, lo, hi, 1e-12));
    }
  }
  return total;
}

double aggregate_variation_closed_form(const ModelSpec& model,
                                       const SimplexPoint& z) {
  if (!model.is_gcwp())
    throw std::invalid_argument("aggregate_variation_closed_form: GCWP only");
  if (z.q() != model.q())
    throw std::invalid_argument("aggregate_variation_closed_form: arity mismatch");
  const int q = model.q();
  const SimplexPoint uniform = SimplexPoint::uniform(q);
  if (model.beta() == 0.0) return 0.0;

  std::vector<double> g(static_cast<std::size_t>(q));
  double total = 0.0;
  for (int k = 0; k < q; ++k) {
    if (!(z[k] > 1.0 / q)) continue;  // only coordinates rising above 1/q
    const auto deriv_k = [&](double t) {
      return segment_derivative(model, uniform, z, t)[static_cast<std::size_t>(k)];
    };
    // The derivative starts positive and changes sign at most once; t* = 1
    // when it never does.
    double t_star = 1.0;
    if (deriv_k(1.0) < 0.0)
      t_star = (deriv_k(0.0) > 0.0) ? bisect_root(deriv_k, 0.0, 1.0, 1e-12) : 0.0;
    const std::vector<double> y = segment_point(uniform, z, t_star);
    g_function_into(model, y, g);
    total += 2.0 * (g[static_cast<std::size_t>(k)] - 1.0 / q);
  }
  return total;
}

namespace {

// Barycentric grid of resolution `resolution` as count vectors over q parts.
std::vector<std::vector<double>> barycentric_grid(int q, int resolution) {
  std::vector<std::vector<double>> grid;
  std::vector<std::int64_t> parts(static_cast<std::size_t>(q), 0);
  const std::function<void(int, std::int64_t)> rec = [&](int pos, std::int64_t left) {
    if (pos == q - 1) {
      parts[static_cast<std::size_t>(pos)] = left;
      std::vector<double> z(static_cast<std::size_t>(q));
      for (int k = 0; k < q; ++k)
        z[static_cast<std::size_t>(k)] =
            static_cast<double>(parts[static_cast<std::size_t>(k)]) / resolution;
      grid.push_back(std::move(z));
      return;
    }
    for (std::int64_t c = 0; c <= left; ++c) {
      parts[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, resolution);
  return grid;
}

SimplexPoint unique_equilibrium(const ModelSpec& model) {
  EquilibriaOptions options;
  options.grid_cross_validate = model.q() <= 4;
  const EquilibriumSolution eq = find_equilibria(model, options);
  if (eq.phase != Phase::unique)
    throw std::invalid_argument(
        "condition check: the equilibrium macrostate is not unique at this beta");
  return eq.z_beta;
}

constexpr double kExclusionRadius = 1e-4;

double variation_ratio(const ModelSpec& model, const SimplexPoint& z_beta,
                       std::span<const double> z) {
  const double dist = l1_diff(z, z_beta.span());
  if (dist <= kExclusionRadius) return 0.0;
  const SimplexPoint zp{std::vector<double>(z.begin(), z.end())};
  const double variation =
      model.is_gcwp() ? aggregate_variation_closed_form(model, zp)
                      : aggregate_variation_quadrature(model, z_beta, zp);
  return variation / dist;
}

// Pattern-search ascent of the variation ratio around the grid argmax.
std::pair<double, std::vector<double>> refine_ratio_max(
    const ModelSpec& model, const SimplexPoint& z_beta, std::vector<double> z,
    double step) {
  const int q = static_cast<int>(z.size());
  double best = variation_ratio(model, z_beta, z);
  while (step > 1e-7) {
    bool improved = false;
    for (int i = 0; i < q && !improved; ++i) {
      for (int j = 0; j < q && !improved; ++j) {
        if (i == j) continue;
        if (z[static_cast<std::size_t>(j)] < step) continue;
        std::vector<double> trial = z;
        trial[static_cast<std::size_t>(i)] += step;
        trial[static_cast<std::size_t>(j)] -= step;
        const double v = variation_ratio(model, z_beta, trial);
        if (v > best + 1e-14) {
          best = v;
          z = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, z};
}

}  // namespace

ConditionReport check_condition_contraction(const ModelSpec& model,
                                            int grid_resolution, int threads) {
  if (grid_resolution < 2)
    throw std::invalid_argument("check_condition_contraction: bad resolution");
  const SimplexPoint z_beta = unique_equilibrium(model);
  const auto grid = barycentric_grid(model.q(), grid_resolution);
  std::vector<double> ratios(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    ratios[i] = variation_ratio(model, z_beta, grid[i]);
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (ratios[i] > ratios[arg]) arg = i;

  auto [sup, argmax] =
      refine_ratio_max(model, z_beta, grid[arg], 1.0 / grid_resolution);

  ConditionReport report;
  report.condition = "contraction";
  report.holds = sup < 1.0;
  report.sup_ratio = sup;
  report.argmax = std::move(argmax);
  report.beta = model.beta();
  report.q = model.q();
  report.r = model.r();
  report.grid_resolution = grid_resolution;
  return report;
}

ConditionReport check_condition_riemann(const ModelSpec& model, double epsilon,
                                        int grid_resolution, int threads) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("check_condition_riemann: epsilon must be > 0");
  if (grid_resolution < 2)
    throw std::invalid_argument("check_condition_riemann: bad resolution");
  const SimplexPoint z_beta = unique_equilibrium(model);
  const auto grid = barycentric_grid(model.q(), grid_resolution);
  const int q = model.q();
  std::vector<double> ratios(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const double dist = l1_diff(grid[i], z_beta.span());
    if (dist < epsilon) return;
    const SimplexPoint z{std::vector<double>(grid[i].begin(), grid[i].end())};
    const MonotonePath path = build_monotone_path(z_beta, z, epsilon);
    double sum = 0.0;
    for (std::size_t s = 0; s + 1 < path.points.size(); ++s) {
      const SimplexPoint& from = path.points[s];
      const SimplexPoint& to = path.points[s + 1];
      std::vector<double> step(static_cast<std::size_t>(q));
      for (int k = 0; k < q; ++k)
        step[static_cast<std::size_t>(k)] = to[k] - from[k];
      const std::vector<double> dg =
          g_directional_derivative(model, from.span(), step);
      for (double v : dg) sum += std::abs(v);
    }
    ratios[i] = sum / dist;
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (ratios[i] > ratios[arg]) arg = i;

  ConditionReport report;
  report.condition = "riemann";
  report.holds = ratios[arg] < 1.0;
  report.sup_ratio = ratios[arg];
  report.argmax = grid[arg];
  report.beta = model.beta();
  report.q = model.q();
  report.r = model.r();
  report.epsilon = epsilon;
  report.grid_resolution = grid_resolution;
  return report;
}

ConditionReport check_condition_local(const ModelSpec& model) {
  const SimplexPoint z_beta = unique_equilibrium(model);
  const int q = model.q();
  double z_min = 1.0;
  for (int k = 0; k < q; ++k) z_min = std::min(z_min, z_beta[k]);

  constexpr int kDirections = 500;
  const std::vector<double> radii{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  RngStream rng(0x6C6F63616C726E67ull, 0);  // fixed internal stream

  std::vector<std::vector<double>> dirs;
  dirs.reserve(kDirections);
  for (int d = 0; d < kDirections; ++d) {
    std::vector<double> v(static_cast<std::size_t>(q));
    double mean = 0.0;
    for (int k = 0; k < q; ++k) {
      // Box-Muller normal deviate
      const double u1 = std::max(rng.next_double(), 1e-300);
      const double u2 = rng.next_double();
      v[static_cast<std::size_t>(k)] =
          std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      mean += v[static_cast<std::size_t>(k)];
    }
    mean /= q;
    double norm = 0.0;
    for (double& x : v) {
      x -= mean;
      norm += std::abs(x);
    }
    if (norm < 1e-12) {
      --d;
      continue;
    }
    for (double& x : v) x /= norm;
    dirs.push_back(std::move(v));
  }

  std::vector<double> g_base(static_cast<std::size_t>(q));
  g_function_into(model, z_beta.span(), g_base);
  std::vector<double> ratio_at_radius;
  std::vector<double> y(static_cast<std::size_t>(q));
  std::vector<double> g(static_cast<std::size_t>(q));
  for (double radius : radii) {
    if (radius >= z_min) continue;  // sphere would leave the simplex
    double worst = 0.0;
    for (const auto& v : dirs) {
      for (int k = 0; k < q; ++k)
        y[static_cast<std::size_t>(k)] =
            z_beta[k] + radius * v[static_cast<std::size_t>(k)];
      g_function_into(model, y, g);
      worst = std::max(worst, l1_diff(g, g_base) / radius);
    }
    ratio_at_radius.push_back(worst);
  }
  if (ratio_at_radius.size() < 2)
    throw std::runtime_error("check_condition_local: equilibrium too close to the boundary");

  // Linear-in-radius extrapolation from the two smallest radii.
  const double r_small = ratio_at_radius.back();
  const double r_prev = ratio_at_radius[ratio_at_radius.size() - 2];
  const double estimate = r_small - (r_prev - r_small) / 9.0;

  ConditionReport report;
  report.condition = "local";
  report.holds = estimate < 1.0;
  report.sup_ratio = estimate;
  report.beta = model.beta();
  report.q = model.q();
  report.r = model.r();
  if (model.is_gcwp())
    report.analytic = model.beta() * (model.r() - 1.0) /
                      std::pow(static_cast<double>(q), model.r() - 1.0);
  return report;
}

}  // namespace gibbslab
