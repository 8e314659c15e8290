#include "aniso/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

void same_dim(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw ArgumentError("points must share a dimension >= 1");
}

double inside_depth(std::span<const double> x, const Domain& d) {
  if (x.size() != d.dim()) throw ArgumentError("point dimension differs from domain dimension");
  const double delta = d.depth(x);
  if (!(delta > 0.0)) throw DomainError("point is not inside the domain");
  return delta;
}

// phi(delta) with phi(inf) = inf.
double phi_of_depth(const ScaleFunction& f, double delta) {
  return std::isinf(delta) ? std::numeric_limits<double>::infinity() : f.eval(delta);
}

double root_ratio(double num, double den) {
  if (std::isinf(num)) return 1.0;
  return std::min(1.0, std::sqrt(num / den));
}

std::vector<double> coord_diffs(std::span<const double> x, std::span<const double> y) {
  std::vector<double> diffs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diffs[i] = std::abs(x[i] - y[i]);
  return diffs;
}

// prod_i 1/(|dx_i| phi(|dx_i|)) for the Green estimates, which need distinct coordinates.
double green_product(const ScaleFunction& f, std::span<const double> diffs) {
  double prod = 1.0;
  for (double r : diffs) prod *= f.nu1(r);
  return prod;
}

std::vector<double> green_diffs(std::span<const double> x, std::span<const double> y,
                                const Domain& d) {
  same_dim(x, y);
  if (d.dim() < 2) throw ArgumentError("green_bound needs d >= 2; use green_bound_1d");
  auto diffs = coord_diffs(x, y);
  for (double r : diffs) {
    if (r == 0.0) throw UnsupportedConfiguration("Green estimate requires x_i != y_i for every i");
  }
  return diffs;
}

double green_term(const ScaleFunction& f, double r, double phi_dx, double phi_dy, std::size_t dim) {
  const double pr = f.eval(r);
  return root_ratio(phi_dx, pr) * root_ratio(phi_dy, pr) * std::pow(pr, static_cast<double>(dim + 1));
}

}  // namespace

SandwichWindow::SandwichWindow(double lower, double upper) : c_lower(lower), c_upper(upper) {
  if (!(lower > 0.0 && upper >= lower)) throw ArgumentError("window needs 0 < c_lower <= c_upper");
}

SandwichWindow SandwichWindow::fit(std::span<const double> ratios) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double r : ratios) {
    if (!(std::isfinite(r) && r > 0.0)) continue;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!(hi > 0.0)) throw ArgumentError("no finite positive ratio to fit a window");
  return {lo, hi};
}

double hke_bound(const ScaleFunction& f, double t, std::span<const double> x,
                 std::span<const double> y) {
  if (!(t > 0.0)) throw DomainError("hke_bound needs t > 0");
  same_dim(x, y);
  const double scale = f.inverse_extended(t);
  double value = std::pow(scale, -static_cast<double>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(x[i] - y[i]);
    if (r == 0.0) continue;
    value *= std::min(1.0, t * scale * f.nu1(r));
  }
  return value;
}

double psi_decay(const ScaleFunction& f, double t, std::span<const double> x, const Domain& d) {
  if (!(t > 0.0)) throw DomainError("psi_decay needs t > 0");
  return root_ratio(phi_of_depth(f, inside_depth(x, d)), t);
}

double dirichlet_bound(const ScaleFunction& f, double t, std::span<const double> x,
                       std::span<const double> y, const Domain& d) {
  return psi_decay(f, t, x, d) * psi_decay(f, t, y, d) * hke_bound(f, t, x, y);
}

double survival_bound(const ScaleFunction& f, double t, std::span<const double> x, const Domain& d) {
  if (!(t > 0.0)) throw DomainError("survival_bound needs t > 0");
  const double delta = inside_depth(x, d);
  if (std::isinf(delta)) return 1.0;
  return std::min(1.0, f.renewal_v(delta) / std::sqrt(t));
}

std::pair<double, double> mean_exit_ball_window(const ScaleFunction& f, double r,
                                                const SandwichWindow& w) {
  if (!(r > 0.0)) throw DomainError("mean_exit_ball_window needs r > 0");
  const double p = f.eval(r);
  return {w.c_lower * p, w.c_upper * p};
}

double corner_exit_bound(const ScaleFunction& f, double s, double delta) {
  if (!(delta > 0.0)) throw DomainError("corner_exit_bound needs delta > 0");
  if (delta > s) throw ArgumentError("corner_exit_bound needs delta <= s");
  return f.renewal_v(s) * f.renewal_v(delta);
}

double green_bound(const ScaleFunction& f, std::span<const double> x, std::span<const double> y,
                   const Domain& d, Side side) {
  const auto diffs = green_diffs(x, y, d);
  const double phi_dx = phi_of_depth(f, inside_depth(x, d));
  const double phi_dy = phi_of_depth(f, inside_depth(y, d));
  const auto [lo, hi] = std::minmax_element(diffs.begin(), diffs.end());
  const double r = side == Side::lower ? *lo : *hi;
  return green_term(f, r, phi_dx, phi_dy, diffs.size()) * green_product(f, diffs);
}

double green_refined_upper(const ScaleFunction& f, std::span<const double> x,
                           std::span<const double> y, const Domain& d) {
  const auto diffs = green_diffs(x, y, d);
  const double phi_dx = phi_of_depth(f, inside_depth(x, d));
  const double phi_dy = phi_of_depth(f, inside_depth(y, d));
  double sum = 0.0;
  for (double r : diffs) sum += green_term(f, r, phi_dx, phi_dy, diffs.size());
  return sum * green_product(f, diffs);
}

double green_bound_1d(const ScaleFunction& f, std::span<const double> x,
                      std::span<const double> y, const Domain& d) {
  same_dim(x, y);
  if (x.size() != 1) throw ArgumentError("green_bound_1d needs d = 1");
  const double dist = std::abs(x[0] - y[0]);
  if (dist == 0.0) throw UnsupportedConfiguration("green_bound_1d needs x != y");
  const double dx = inside_depth(x, d);
  const double dy = inside_depth(y, d);
  if (std::isinf(dx) || std::isinf(dy)) throw DomainError("green_bound_1d needs a boundary");
  const double a = std::sqrt(f.eval(dx) * f.eval(dy));
  const double scale = f.inverse_extended(a);
  double second = a / scale;
  if (scale > dist) {
    auto integrand = [&f](double s) { return f.eval(s) / (s * s); };
    second += quad::smooth(integrand, dist, scale, 1e-10).value;
  }
  return std::min(a / dist, second);
}

double large_time_bound(const ScaleFunction& f, double t, std::span<const double> x,
                        std::span<const double> y, const Domain& d, double lambda_hat) {
  if (!(t >= 0.0)) throw DomainError("large_time_bound needs t >= 0");
  if (!(lambda_hat > 0.0)) throw ArgumentError("large_time_bound needs lambda_hat > 0");
  const double px = phi_of_depth(f, inside_depth(x, d));
  const double py = phi_of_depth(f, inside_depth(y, d));
  return std::exp(-t * lambda_hat) * std::sqrt(px * py);
}

double exit_prob_bound(const ScaleFunction& f, double r, double mean_exit) {
  if (!(r > 0.0)) throw DomainError("exit_prob_bound needs r > 0");
  if (!(mean_exit >= 0.0)) throw ArgumentError("mean exit time must be >= 0");
  return std::min(1.0, mean_exit / f.eval(r));
}

}  // namespace aniso
