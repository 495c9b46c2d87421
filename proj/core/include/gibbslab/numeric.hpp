#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gibbslab {

/// log(sum(exp(v))) with max-subtraction.
double log_sum_exp(std::span<const double> v);

/// In-place softmax with max-subtraction; result sums to 1 up to rounding.
void softmax_inplace(std::span<double> v);

double l1_norm(std::span<const double> v);
double l1_diff(std::span<const double> a, std::span<const double> b);

/// Total variation distance between two probability vectors: (1/2) sum |a-b|.
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Bisection for a root of f on [lo, hi]; requires a sign change.
/// Stops when the bracket is narrower than xtol; returns the midpoint.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter = 200);

/// Golden-section maximization of a unimodal f on [lo, hi] to width xtol.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double xtol);

/// Adaptive Simpson quadrature of a smooth integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (x_i, y_i).
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fixed 17-significant-digit representation used for all emitted floats.
std::string format_g17(double v);

}  // namespace gibbslab
