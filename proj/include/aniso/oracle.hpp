#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp uses unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

#include "aniso/scalefn.hpp"

namespace aniso {

// Transition density of one coordinate at a fixed time t, by Fourier inversion of
// exp(-t psi):
//   p(t, z) = (1/pi) \int_0^Xi cos(xi z) exp(-t psi(xi)) dxi,   t psi(Xi) >= 40.
// Composite 16-point Gauss-Legendre panels, geometrically graded towards xi = 0 and
// uniform beyond; |z| too large for the panel width falls back to a double-exponential
// Fourier quadrature on (0, inf).
class TransitionDensity1D {
 public:
  static constexpr std::size_t kDefaultNodes = std::size_t{1} << 16;

  TransitionDensity1D(const ScaleFunction& f, double t, std::size_t nodes = kDefaultNodes);

  double t() const { return t_; }
  double cutoff() const { return cutoff_; }
  // Largest |z| served by the panel rule.
  double z_max() const { return z_max_; }

  double density(double z) const;
  double cdf(double z) const;
  // (cdf(hi) - cdf(lo)) / (hi - lo).
  double box_average(double lo, double hi) const;

  // exp(-t psi(xi)).
  double transform(double xi) const;

 private:
  struct Rule {
    std::vector<double> xi;
    std::vector<double> weight;  // quadrature weight times exp(-t psi)
  };
  Rule build_rule(std::size_t panels) const;
  static double apply_cos(const Rule& r, double z);
  double psi(double xi) const;

  ScaleFunction f_;
  double t_;
  double cutoff_ = 0.0;
  double z_max_ = 0.0;
  // Log-log table of psi for non-power kinds.
  std::vector<double> log_xi_;
  std::vector<double> log_psi_;
  using PsiInterp = boost::math::interpolators::pchip<std::vector<double>>;
  std::shared_ptr<const PsiInterp> interp_;
  Rule rule_;
};

double density_1d(const ScaleFunction& f, double t, double z);

// prod_i p(t, x_i - y_i).
double product_density(const ScaleFunction& f, double t, std::span<const double> x,
                       std::span<const double> y);
double product_density(const TransitionDensity1D& p, std::span<const double> x,
                       std::span<const double> y);
// Average of the product density over y + [-h, h].
double product_box_average(const TransitionDensity1D& p, std::span<const double> x,
                           std::span<const double> y, std::span<const double> h);

struct PVResult {
  double value = 0.0;
  double error = 0.0;
};

using PointFunction = std::function<double(std::span<const double>)>;

// Principal value \int (w(x + tau e_axis) - w(x)) nu1(|tau|) dtau, folded to
// \int_0^inf (w(x + tau e) + w(x - tau e) - 2 w(x)) nu1(tau) dtau. The last coordinate
// of x sets the length scale and must be positive. Inner cutoffs 2^-k scale are removed
// by Richardson extrapolation in the powers (2j - alpha) of the cutoff.
PVResult generator_pv(const ScaleFunction& f, const PointFunction& w, std::span<const double> x,
                      std::size_t axis);

}  // namespace aniso
