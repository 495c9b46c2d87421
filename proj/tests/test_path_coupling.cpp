#include <cmath>
#include <vector>

#include "doctest.h"
#include "gibbslab/equilibrium.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/numeric.hpp"
#include "gibbslab/path_coupling.hpp"
#include "test_util.hpp"

using namespace gibbslab;
using gibbslab::testutil::random_simplex;

namespace {

std::vector<double> segment(const SimplexPoint& a, const SimplexPoint& b,
                            double t) {
  std::vector<double> y(static_cast<std::size_t>(a.q()));
  for (int k = 0; k < a.q(); ++k)
    y[static_cast<std::size_t>(k)] = (1.0 - t) * a[k] + t * b[k];
  return y;
}

}  // namespace

TEST_CASE("build_monotone_path splits evenly") {
  const SimplexPoint a({0.5, 0.5});
  const SimplexPoint b({0.75, 0.25});  // l1 distance exactly 2 * 0.25
  const MonotonePath two = build_monotone_path(a, b, 0.25);
  REQUIRE(two.steps() == 2);
  CHECK(l1_distance(two.points[0], two.points[1]) == doctest::Approx(0.25));
  CHECK(l1_distance(two.points[1], two.points[2]) == doctest::Approx(0.25));

  const MonotonePath full = build_monotone_path(SimplexPoint({1.0, 0.0}),
                                                SimplexPoint({0.0, 1.0}), 0.5);
  REQUIRE(full.steps() == 4);
  for (std::size_t i = 0; i + 1 < full.points.size(); ++i)
    CHECK(l1_distance(full.points[i], full.points[i + 1]) ==
          doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS(build_monotone_path(a, a, 0.1));
  CHECK(build_monotone_path(a, a, 0.1, true).steps() == 0);
}

TEST_CASE("monotone path invariants on random pairs") {
  RngStream rng(61, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 2 + rng.next_index(3);
    const SimplexPoint a = random_simplex(q, rng);
    const SimplexPoint b = random_simplex(q, rng);
    const double dist = l1_distance(a, b);
    if (dist < 1e-6) continue;
    const double eps = dist / (2.0 + 8.0 * rng.next_double());
    const MonotonePath path = build_monotone_path(a, b, eps);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
      const double len = l1_distance(path.points[i], path.points[i + 1]);
      CHECK(len >= eps - 1e-12);
      CHECK(len < 2.0 * eps);
      total += len;
    }
    CHECK(total == doctest::Approx(dist).epsilon(1e-10));

    // coordinate monotonicity along the path
    for (int k = 0; k < q; ++k) {
      const double direction = b[k] - a[k];
      for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
        const double step = path.points[i + 1][k] - path.points[i][k];
        if (direction >= 0.0)
          CHECK(step >= -1e-15);
        else
          CHECK(step <= 1e-15);
      }
    }
  }
}

TEST_CASE("aggregate variation trivial cases") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.0);
  const SimplexPoint z({0.6, 0.25, 0.15});
  CHECK(aggregate_variation_quadrature(m, z, z) == 0.0);

  const ModelSpec m0 = ModelSpec::gcwp(3, 2.0, 0.0);
  CHECK(aggregate_variation_quadrature(m0, SimplexPoint::uniform(3), z) == 0.0);
  CHECK(aggregate_variation_closed_form(m0, z) == 0.0);
  CHECK(aggregate_variation_closed_form(m, SimplexPoint::uniform(3)) == 0.0);
}

TEST_CASE("closed form equals quadrature on the symmetric q = 2 family") {
  for (double beta : {0.5, 1.5}) {
    const ModelSpec m = ModelSpec::gcwp(2, 2.0, beta);
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      const SimplexPoint z({0.5 + a, 0.5 - a});
      const double closed = aggregate_variation_closed_form(m, z);
      const double quad =
          aggregate_variation_quadrature(m, SimplexPoint::uniform(2), z);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
  }
}

TEST_CASE("closed form equals quadrature on random points below beta_s") {
  RngStream rng(62, 0);
  for (int q : {2, 3}) {
    const double beta_s = find_beta_s(q, 2.0);
    for (int trial = 0; trial < 15; ++trial) {
      const double beta = (0.1 + 0.85 * rng.next_double()) * beta_s;
      const ModelSpec m = ModelSpec::gcwp(q, 2.0, beta);
      const SimplexPoint z = random_simplex(q, rng);
      if (l1_distance(z, SimplexPoint::uniform(q)) < 1e-4) continue;
      const double closed = aggregate_variation_closed_form(m, z);
      const double quad =
          aggregate_variation_quadrature(m, SimplexPoint::uniform(q), z);
      CHECK(std::abs(closed - quad) < 1e-8);
      // variation along the segment contracts below beta_s
      CHECK(closed < l1_distance(z, SimplexPoint::uniform(q)));
    }
  }
}

TEST_CASE("quadrature is symmetric under segment reversal") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.4);
  RngStream rng(63, 0);
  const SimplexPoint a = random_simplex(3, rng);
  const SimplexPoint b = random_simplex(3, rng);
  CHECK(aggregate_variation_quadrature(m, a, b) ==
        doctest::Approx(aggregate_variation_quadrature(m, b, a)).epsilon(1e-9));
}

TEST_CASE("coordinate monotonicity claims along the center segment") {
  RngStream rng(64, 0);
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 2.2);
  const SimplexPoint uniform = SimplexPoint::uniform(3);
  std::vector<double> g(3);
  for (int trial = 0; trial < 100; ++trial) {
    const SimplexPoint z = random_simplex(3, rng);
    for (int k = 0; k < 3; ++k) {
      double prev = 1.0 / 3.0;
      int sign_changes = 0;
      double prev_diff = 0.0;
      for (int i = 1; i <= 1000; ++i) {
        const double t = static_cast<double>(i) / 1000.0;
        g_function_into(m, segment(uniform, z, t), g);
        const double diff = g[static_cast<std::size_t>(k)] - prev;
        if (z[k] <= 1.0 / 3.0) {
          // claim (a): nonincreasing when the coordinate does not rise
          CHECK(diff <= 1e-12);
        } else if (i > 1 && diff * prev_diff < 0.0) {
          ++sign_changes;
        }
        prev = g[static_cast<std::size_t>(k)];
        prev_diff = diff;
      }
      if (z[k] > 1.0 / 3.0) CHECK(sign_changes <= 1);  // claim (b)
    }
  }
}

TEST_CASE("weighted inner product grows along the segment") {
  RngStream rng(65, 0);
  for (double r : {2.0, 3.0}) {
    const ModelSpec m = ModelSpec::gcwp(3, r, 1.8);
    std::vector<double> g(3);
    for (int trial = 0; trial < 30; ++trial) {
      const SimplexPoint z = random_simplex(3, rng);
      if (l1_distance(z, SimplexPoint::uniform(3)) < 1e-6) continue;
      double prev = -1e9;
      for (int i = 0; i <= 400; ++i) {
        const double t = static_cast<double>(i) / 400.0;
        const auto y = segment(SimplexPoint::uniform(3), z, t);
        g_function_into(m, y, g);
        double ip = 0.0;
        for (int j = 0; j < 3; ++j)
          ip += g[static_cast<std::size_t>(j)] * (z[j] - 1.0 / 3.0) *
                std::pow(y[static_cast<std::size_t>(j)], r - 2.0);
        CHECK(ip >= prev - 1e-12);
        prev = ip;
      }
    }
  }
}

TEST_CASE("segment derivative matches finite differences of g") {
  RngStream rng(66, 0);
  for (double r : {2.0, 2.5}) {
    const ModelSpec m = ModelSpec::gcwp(3, r, 1.6);
    const SimplexPoint uniform = SimplexPoint::uniform(3);
    for (int trial = 0; trial < 20; ++trial) {
      const SimplexPoint z = random_simplex(3, rng);
      std::vector<double> dir(3);
      for (int k = 0; k < 3; ++k) dir[static_cast<std::size_t>(k)] = z[k] - uniform[k];
      for (double t : {0.2, 0.5, 0.8}) {
        const auto y = segment(uniform, z, t);
        const auto analytic = g_directional_derivative(m, y, dir);
        for (int k = 0; k < 3; ++k) {
          const auto slice = [&](double s) {
            std::vector<double> g(3);
            g_function_into(m, segment(uniform, z, s), g);
            return g[static_cast<std::size_t>(k)];
          };
          const double fd = (slice(t + 1e-6) - slice(t - 1e-6)) / 2e-6;
          CHECK(std::abs(analytic[static_cast<std::size_t>(k)] - fd) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("contraction condition holds below beta_s and fails between") {
  const double beta_s = find_beta_s(3, 2.0);
  const double beta_c = find_beta_c(3, 2.0);

  const ConditionReport hold =
      check_condition_contraction(ModelSpec::gcwp(3, 2.0, 0.9 * beta_s), 100);
  CHECK(hold.holds);
  CHECK(hold.sup_ratio < 1.0);
  CHECK(hold.sup_ratio > 0.0);

  // between beta_s and beta_c the equilibrium is still unique but some z
  // violates the contraction
  const double beta_mid = 0.5 * (beta_s + beta_c);
  const ConditionReport fail =
      check_condition_contraction(ModelSpec::gcwp(3, 2.0, beta_mid), 200);
  CHECK(!fail.holds);
  CHECK(fail.sup_ratio >= 1.0);

  const ConditionReport zero =
      check_condition_contraction(ModelSpec::gcwp(3, 2.0, 0.0), 60);
  CHECK(zero.holds);
  CHECK(zero.sup_ratio == 0.0);

  // beyond beta_c the macrostate is degenerate: checkers refuse to run
  CHECK_THROWS(check_condition_contraction(ModelSpec::gcwp(3, 2.0, 1.2 * beta_c), 60));
}

TEST_CASE("riemann condition mirrors the continuous one") {
  const double beta_s = find_beta_s(3, 2.0);
  const ConditionReport hold = check_condition_riemann(
      ModelSpec::gcwp(3, 2.0, 0.9 * beta_s), 0.02, 100);
  CHECK(hold.holds);
  CHECK(hold.sup_ratio < 1.0);

  const ConditionReport zero =
      check_condition_riemann(ModelSpec::gcwp(3, 2.0, 0.0), 0.02, 60);
  CHECK(zero.holds);
  CHECK(zero.sup_ratio == 0.0);
}

TEST_CASE("riemann sums approach the quadrature linearly in epsilon") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.9);
  const SimplexPoint uniform = SimplexPoint::uniform(3);
  RngStream rng(67, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexPoint z = random_simplex(3, rng);
    const double dist = l1_distance(z, uniform);
    if (dist < 0.35) continue;
    const double quad = aggregate_variation_quadrature(m, uniform, z);
    const std::vector<double> epsilons{0.08, 0.04, 0.02, 0.01};
    std::vector<double> diffs;
    for (double eps : epsilons) {
      const MonotonePath path = build_monotone_path(uniform, z, eps);
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
        std::vector<double> step(3);
        for (int k = 0; k < 3; ++k)
          step[static_cast<std::size_t>(k)] =
              path.points[i + 1][k] - path.points[i][k];
        for (double v :
             g_directional_derivative(m, path.points[i].span(), step))
          sum += std::abs(v);
      }
      diffs.push_back(std::abs(sum - quad));
    }
    // fit the constant on the coarsest spacing, check the linear envelope
    const double c = diffs[0] / epsilons[0];
    for (std::size_t i = 1; i < epsilons.size(); ++i)
      CHECK(diffs[i] <= 3.0 * c * epsilons[i] + 1e-9);
  }
}

TEST_CASE("local contraction ratio matches the closed form") {
  const ConditionReport a =
      check_condition_local(ModelSpec::gcwp(3, 2.0, 1.0));
  REQUIRE(a.analytic.has_value());
  CHECK(*a.analytic == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(a.sup_ratio - 1.0 / 3.0) < 1e-3);
  CHECK(a.holds);

  const ConditionReport b =
      check_condition_local(ModelSpec::gcwp(2, 3.0, 1.0));
  REQUIRE(b.analytic.has_value());
  CHECK(*b.analytic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(b.sup_ratio - 0.5) < 1e-3);

  const ConditionReport zero =
      check_condition_local(ModelSpec::gcwp(3, 2.0, 0.0));
  CHECK(zero.sup_ratio == doctest::Approx(0.0));
  CHECK(zero.holds);
}

TEST_CASE("checkers agree between the custom-interaction and GCWP routes") {
  // The same interaction wired through the custom path forces the checker
  // onto its quadrature rail; the GCWP path uses the closed form.
  Interaction h;
  h.value = [](int, double t) { return -0.5 * t * t; };
  h.d1 = [](int, double t) { return -t; };
  h.d2 = [](int, double) { return -1.0; };
  const double beta = 1.2;
  const ModelSpec custom = ModelSpec::custom(2, beta, h, 2.0);
  const ModelSpec gcwp = ModelSpec::gcwp(2, 2.0, beta);

  const ConditionReport a = check_condition_contraction(custom, 40);
  const ConditionReport b = check_condition_contraction(gcwp, 40);
  CHECK(a.holds == b.holds);
  CHECK(a.sup_ratio == doctest::Approx(b.sup_ratio).epsilon(1e-7));

  const ConditionReport la = check_condition_local(custom);
  const ConditionReport lb = check_condition_local(gcwp);
  CHECK(!la.analytic.has_value());
  CHECK(la.sup_ratio == doctest::Approx(lb.sup_ratio).epsilon(1e-9));
  CHECK(la.holds);
}
