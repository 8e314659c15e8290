#pragma once

#include <span>
#include <utility>

#include "aniso/geometry.hpp"
#include "aniso/scalefn.hpp"

namespace aniso {

// Comparability constants of a two-sided estimate, fitted from data.
struct SandwichWindow {
  double c_lower = 1.0;
  double c_upper = 1.0;

  SandwichWindow() = default;
  SandwichWindow(double lower, double upper);
  double spread() const { return c_upper / c_lower; }
  // Smallest window containing every (finite, positive) ratio.
  static SandwichWindow fit(std::span<const double> ratios);
};

// Whole-space kernel: [phi^-1(t)]^-d prod_i (1 ^ t phi^-1(t) / (|x_i - y_i| phi(|x_i - y_i|))).
double hke_bound(const ScaleFunction& f, double t, std::span<const double> x,
                 std::span<const double> y);

// Psi(t, x) = 1 ^ sqrt(phi(delta_D(x)) / t).
double psi_decay(const ScaleFunction& f, double t, std::span<const double> x, const Domain& d);

double dirichlet_bound(const ScaleFunction& f, double t, std::span<const double> x,
                       std::span<const double> y, const Domain& d);

// 1 ^ V(delta_D(x)) / sqrt(t).
double survival_bound(const ScaleFunction& f, double t, std::span<const double> x, const Domain& d);

// (c_lower phi(r), c_upper phi(r)).
std::pair<double, double> mean_exit_ball_window(const ScaleFunction& f, double r,
                                                const SandwichWindow& w = {});

// V(s) V(delta), for 0 < delta <= s.
double corner_exit_bound(const ScaleFunction& f, double s, double delta);

enum class Side { lower, upper };

// d >= 2 Green function estimate with r = min |x_i - y_i| (lower) or max (upper).
double green_bound(const ScaleFunction& f, std::span<const double> x, std::span<const double> y,
                   const Domain& d, Side side);
// Sum of the per-coordinate terms with r = |x_i - y_i|.
double green_refined_upper(const ScaleFunction& f, std::span<const double> x,
                           std::span<const double> y, const Domain& d);
// d = 1: a/|x-y| ^ (a/phi^-1(a) + (\int_{|x-y|}^{phi^-1(a)} phi(s)/s^2 ds)^+),
// a = sqrt(phi(delta(x)) phi(delta(y))).
double green_bound_1d(const ScaleFunction& f, std::span<const double> x,
                      std::span<const double> y, const Domain& d);

// e^{-t lambda} sqrt(phi(delta(x)) phi(delta(y))).
double large_time_bound(const ScaleFunction& f, double t, std::span<const double> x,
                        std::span<const double> y, const Domain& d, double lambda_hat);

// min(1, mean_exit / phi(r)).
double exit_prob_bound(const ScaleFunction& f, double r, double mean_exit);

}  // namespace aniso
