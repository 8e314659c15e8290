#include "aniso/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aniso/errors.hpp"

namespace aniso::quad {

namespace {

void require_finite(const Result& r, const char* what) {
  if (!std::isfinite(r.value) || !std::isfinite(r.error)) {
    throw NumericalError(std::string(what) + ": non-finite quadrature result (value=" +
                         std::to_string(r.value) + ", error=" + std::to_string(r.error) + ")");
  }
}

}  // namespace

Result finite(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double err = 0.0;
  double l1 = 0.0;
  double v = 0.0;
  try {
    v = integrator.integrate(f, a, b, rel_tol, &err, &l1);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("tanh-sinh: ") + e.what());
  }
  Result r{v, err * (l1 > 0.0 ? l1 : 1.0)};
  require_finite(r, "tanh-sinh");
  return r;
}

Result smooth(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &err);
  Result r{v, err};
  require_finite(r, "gauss-kronrod");
  return r;
}

Result gauss_fixed(const Integrand& f, double a, double b) {
  using boost::math::quadrature::gauss;
  const double hi = gauss<double, 30>::integrate(f, a, b);
  const double lo = gauss<double, 20>::integrate(f, a, b);
  Result r{hi, std::abs(hi - lo)};
  require_finite(r, "gauss");
  return r;
}

Result log_tail(const Integrand& f, double a, double rel_tol) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  auto g = [&](double u) {
    if (u > 700.0) return 0.0;
    const double r = a * std::exp(u);
    return f(r) * r;
  };
  double err = 0.0;
  double l1 = 0.0;
  double v = 0.0;
  try {
    v = integrator.integrate(g, 0.0, std::numeric_limits<double>::infinity(), rel_tol, &err, &l1);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("exp-sinh: ") + e.what());
  }
  Result r{v, err * (l1 > 0.0 ? l1 : 1.0)};
  require_finite(r, "exp-sinh tail");
  return r;
}

Result fourier_cos(const Integrand& f, double omega) {
  static thread_local boost::math::quadrature::ooura_fourier_cos<double> integrator(1e-10, 8);
  auto [v, e] = integrator.integrate(f, omega);
  Result r{v, std::abs(e * v)};
  require_finite(r, "ooura cosine");
  return r;
}

Result fourier_sin(const Integrand& f, double omega) {
  static thread_local boost::math::quadrature::ooura_fourier_sin<double> integrator(1e-10, 8);
  auto [v, e] = integrator.integrate(f, omega);
  Result r{v, std::abs(e * v)};
  require_finite(r, "ooura sine");
  return r;
}

}  // namespace aniso::quad
