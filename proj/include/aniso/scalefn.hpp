#pragma once

#include <optional>
#include <span>
#include <vector>

namespace aniso {

enum class ScaleKind { power, power_log, tabulated };

// The increasing scaling function phi of a weakly scaling jump kernel, together with
// everything derived from it: the one-dimensional jump density nu1(r) = 1/(r phi(r)),
// the renewal surrogate V = sqrt(phi), the characteristic exponent psi and the Pruitt
// function h.
//
//   power       phi(r) = r^alpha
//   power_log   phi(r) = r^alpha (1 + log+(1/r))^(-beta)
//   tabulated   log-log linear interpolation through (r_k, phi_k), extended by power
//               laws with the end-segment exponents
//
// operator() and inverse() enforce the validity range [r_min, r_max]. eval() and
// inverse_extended() are the unchecked analytic extensions to (0, inf) used inside
// integrals of nu1.
class ScaleFunction {
 public:
  static ScaleFunction power(double alpha);
  static ScaleFunction power(double alpha, double r_min, double r_max);
  static ScaleFunction power_log(double alpha, double beta, double r_min = 1e-6,
                                 double r_max = 1e6);
  static ScaleFunction tabulated(std::vector<double> r, std::vector<double> phi);

  ScaleKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  std::span<const double> table_r() const { return table_r_; }
  std::span<const double> table_phi() const { return table_phi_; }

  double operator()(double r) const;
  double eval(double r) const;

  double inverse(double t) const;
  double inverse_extended(double t) const;

  double nu1(double r) const;
  double renewal_v(double r) const;

  // psi(xi) = \int (1 - cos(xi r)) nu1(|r|) dr, always by quadrature.
  double char_exponent(double xi) const;
  // Closed form c_alpha |xi|^alpha for the power kind, quadrature otherwise.
  double char_exponent_fast(double xi) const;

  // h(r) = \int (1 ^ z^2 / r^2) nu1(|z|) dz, by quadrature.
  double pruitt_h(double r) const;

  // One-sided tail mass \int_a^\infty nu1(r) dr.
  double tail_mass(double a) const;
  // One-sided truncated second moment \int_0^eps r^2 nu1(r) dr.
  double small_jump_moment(double eps) const;

  // Local log-slope d log phi / d log r (the running scaling exponent).
  double local_exponent(double r) const;

  bool operator==(const ScaleFunction& other) const = default;

 private:
  ScaleFunction() = default;
  double eval_tabulated(double r) const;
  // \int_a^\infty cos(w r) nu1(r) dr.
  double cos_tail(double w, double a) const;

  ScaleKind kind_ = ScaleKind::power;
  double alpha_ = 1.0;
  double beta_ = 0.0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  std::vector<double> table_r_;
  std::vector<double> table_phi_;
  double slope_low_ = 0.0;
  double slope_high_ = 0.0;
};

// c_alpha = \int_R (1 - cos r) |r|^(-1-alpha) dr = pi / (Gamma(1+alpha) sin(pi alpha/2)).
double stable_constant(double alpha);

// Empirical weak-scaling certificate over a grid of radii: the tightest exponents with
// c_low (R/r)^alpha_low <= phi(R)/phi(r) <= c_high (R/r)^alpha_high on every grid pair.
struct WeakScalingCert {
  double alpha_low = 0.0;
  double alpha_high = 0.0;
  double c_low = 1.0;
  double c_high = 1.0;
  std::vector<double> grid;
};

WeakScalingCert validate_ws(const ScaleFunction& f, std::span<const double> grid);

// Geometric grid of n radii between lo and hi, inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

}  // namespace aniso
