#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "aniso/errors.hpp"
#include "aniso/scalefn.hpp"
#include "generators.hpp"

using aniso::ScaleFunction;
using doctest::Approx;

TEST_CASE("phi values and range checks") {
  CHECK(ScaleFunction::power(1.5)(4.0) == Approx(8.0).epsilon(1e-15));
  CHECK(ScaleFunction::power(0.5)(9.0) == Approx(3.0).epsilon(1e-15));
  const auto tab = ScaleFunction::tabulated({1.0, 2.0, 4.0}, {2.0, 5.0, 9.0});
  CHECK(tab(2.0) == Approx(5.0).epsilon(1e-15));
  const auto bounded = ScaleFunction::power(1.0, 0.1, 10.0);
  CHECK_THROWS_AS(bounded(20.0), aniso::RangeError);
  CHECK_THROWS_AS(bounded.inverse(1000.0), aniso::RangeError);
}

TEST_CASE("phi inverse") {
  CHECK(ScaleFunction::power(1.5).inverse(8.0) == Approx(4.0).epsilon(1e-14));
  for (double a : {0.3, 1.0, 1.7}) CHECK(ScaleFunction::power(a).inverse(1.0) == Approx(1.0));

  // power_log: bracket the root on a dense monotone scan, independent of the bisection.
  const auto f = ScaleFunction::power_log(1.0, 0.5);
  const double r = f.inverse(0.3);
  CHECK(std::abs(f(r) - 0.3) <= 3e-11);
  auto phi = [](double s) { return s / std::sqrt(1.0 + std::log(1.0 / s)); };
  double lo = 0.0, hi = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double a = 0.01 + 0.99 * k / n;
    const double b = 0.01 + 0.99 * (k + 1) / n;
    if (phi(a) <= 0.3 && phi(b) > 0.3) {
      lo = a;
      hi = b;
    }
  }
  CHECK(r >= lo);
  CHECK(r <= hi);
  CHECK(r == Approx(0.41205935179620812).epsilon(1e-12));
}

TEST_CASE("nu1 and renewal surrogate") {
  const auto f1 = ScaleFunction::power(1.0);
  CHECK(f1.nu1(2.0) == Approx(0.25));
  CHECK(f1.nu1(1.0) == Approx(1.0));
  CHECK(ScaleFunction::power(0.5).nu1(4.0) == Approx(0.125));
  CHECK_THROWS_AS(f1.nu1(0.0), aniso::DomainError);
  CHECK(f1.renewal_v(4.0) == Approx(2.0));
  CHECK(f1.renewal_v(0.0) == 0.0);
  CHECK(ScaleFunction::power(1.5).renewal_v(4.0) == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(f1.renewal_v(-1.0), aniso::DomainError);
}

TEST_CASE("characteristic exponent") {
  const auto f1 = ScaleFunction::power(1.0);
  CHECK(std::abs(f1.char_exponent(1.0) - std::numbers::pi) < 1e-6);
  CHECK(std::abs(f1.char_exponent(2.0) - 2.0 * std::numbers::pi) < 2e-6);
  CHECK(f1.char_exponent(0.0) == 0.0);
  CHECK(f1.char_exponent(-2.0) == Approx(f1.char_exponent(2.0)).epsilon(1e-12));

  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    for (double xi : {0.01, 0.3, 1.0, 7.0, 100.0}) {
      CHECK(f.char_exponent(xi) == Approx(aniso::stable_constant(a) * std::pow(xi, a)).epsilon(1e-8));
    }
  }

  // power_log at xi = 1: period-by-period Gauss-Kronrod plus the 1/R tail, independent of
  // the library's Fourier rule.
  const auto pl = ScaleFunction::power_log(1.0, 0.5);
  auto integrand = [](double r) {
    const double phi = r >= 1.0 ? r : r / std::sqrt(1.0 + std::log(1.0 / r));
    return 2.0 * (1.0 - std::cos(r)) / (r * phi);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double ref = GK::integrate(integrand, 0.0, 1.0, 15, 1e-14);
  const double period = 2.0 * std::numbers::pi;
  const int periods = 20000;
  const double end = period * periods;
  ref += GK::integrate(integrand, 1.0, period, 5, 1e-14);
  for (int k = 1; k < periods; ++k) ref += GK::integrate(integrand, k * period, (k + 1) * period, 5, 1e-14);
  ref += 2.0 / end;  // \int_R^inf 2 (1 - cos r) / r^2 dr with R a multiple of 2 pi
  CHECK(pl.char_exponent(1.0) == Approx(ref).epsilon(1e-7));
  CHECK(pl.char_exponent(1.0) == Approx(3.5164954696658706).epsilon(1e-10));
}

TEST_CASE("characteristic exponent is even, nonnegative and nondecreasing") {
  gen::Engine g(11);
  for (int k = 0; k < 20; ++k) {
    const auto f = k % 2 ? ScaleFunction::power(gen::alpha(g))
                         : ScaleFunction::power_log(gen::uniform(g, 0.3, 1.3), 0.5);
    const double xi = gen::log_uniform(g, 1e-2, 1e2);
    const double a = f.char_exponent(xi);
    CHECK(a >= 0.0);
    CHECK(f.char_exponent(-xi) == Approx(a).epsilon(1e-12));
    CHECK(f.char_exponent(1.5 * xi) >= a * (1.0 - 1e-9));
  }
}

TEST_CASE("Pruitt function") {
  const auto f1 = ScaleFunction::power(1.0);
  CHECK(std::abs(f1.pruitt_h(1.0) - 4.0) < 1e-6);
  CHECK(std::abs(f1.pruitt_h(2.0) - 2.0) < 1e-6);
  CHECK(f1.pruitt_h(1e6) < 1e-5);
  CHECK_THROWS_AS(f1.pruitt_h(0.0), aniso::DomainError);

  // power_log, r = 1: 2 (e Gamma(3/2, 1) + 1) after u = log(1/z).
  const auto pl = ScaleFunction::power_log(1.0, 0.5);
  const double ref = 2.0 * (std::exp(1.0) * boost::math::tgamma(1.5, 1.0) + 1.0);
  CHECK(pl.pruitt_h(1.0) == Approx(ref).epsilon(1e-9));
}

TEST_CASE("weak-scaling certificate") {
  const auto grid = aniso::geometric_grid(1e-3, 1e3, 25);
  const auto c = aniso::validate_ws(ScaleFunction::power(1.2), grid);
  CHECK(c.alpha_low == Approx(1.2).epsilon(1e-12));
  CHECK(c.alpha_high == Approx(1.2).epsilon(1e-12));
  CHECK(c.c_low == Approx(1.0).epsilon(1e-12));
  CHECK(c.c_high == Approx(1.0).epsilon(1e-12));

  // phi(r) = r exactly for r >= 1, so the lower exponent is attained at 1.
  const auto pl = aniso::validate_ws(ScaleFunction::power_log(1.0, 0.5), grid);
  CHECK(pl.alpha_low <= 1.0 + 1e-12);
  CHECK(pl.alpha_high > 1.0);
  CHECK(pl.alpha_high < 2.0);

  CHECK_THROWS_AS(ScaleFunction::tabulated({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}), aniso::ValidationError);
  CHECK_THROWS_AS(aniso::validate_ws(ScaleFunction::power(1.0), std::vector<double>{1.0}),
                  aniso::ArgumentError);
}

TEST_CASE("weak-scaling certificate bounds every grid pair") {
  gen::Engine g(5);
  for (int k = 0; k < 10; ++k) {
    const auto f = ScaleFunction::power_log(gen::uniform(g, 0.2, 1.2), gen::uniform(g, 0.0, 0.7));
    const auto grid = aniso::geometric_grid(1e-4, 1e4, 30);
    const auto c = aniso::validate_ws(f, grid);
    CHECK(c.c_low <= 1.0);
    CHECK(c.c_high >= 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = i; j < grid.size(); ++j) {
        const double q = f(grid[j]) / f(grid[i]);
        const double s = grid[j] / grid[i];
        CHECK(q >= c.c_low * std::pow(s, c.alpha_low) * (1.0 - 1e-12));
        CHECK(q <= c.c_high * std::pow(s, c.alpha_high) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("inverse round trip and power scaling") {
  gen::Engine g(1);
  for (int k = 0; k < 200; ++k) {
    const double a = gen::alpha(g);
    const auto f = k % 3 == 0 ? ScaleFunction::power_log(std::min(a, 1.4), 0.5) : ScaleFunction::power(a);
    const double r = gen::log_uniform(g, 1e-4, 1e4);
    CHECK(f.inverse(f(r)) == Approx(r).epsilon(1e-9));
    if (f.kind() == aniso::ScaleKind::power) {
      const double lam = gen::log_uniform(g, 1.0, 100.0);
      CHECK(f(lam * r) / f(r) == Approx(std::pow(lam, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Pruitt and psi comparability windows") {
  for (const auto& f : {ScaleFunction::power(0.5), ScaleFunction::power(1.0), ScaleFunction::power(1.5),
                        ScaleFunction::power_log(1.0, 0.5)}) {
    double hlo = INFINITY, hhi = 0.0, plo = INFINITY, phi_hi = 0.0;
    for (double r : aniso::geometric_grid(1e-3, 1.0, 13)) {
      const double h = f.pruitt_h(r) * f(r);
      const double p = f.char_exponent(1.0 / r) * f(r);
      hlo = std::min(hlo, h);
      hhi = std::max(hhi, h);
      plo = std::min(plo, p);
      phi_hi = std::max(phi_hi, p);
    }
    CHECK(hhi / hlo <= 10.0);
    CHECK(phi_hi / plo <= 10.0);
  }
  CHECK(ScaleFunction::power(1.0).pruitt_h(0.37) * 0.37 == Approx(4.0).epsilon(1e-8));
}

TEST_CASE("renewal surrogate squares to phi and is subadditive") {
  gen::Engine g(3);
  for (int k = 0; k < 500; ++k) {
    const auto f = ScaleFunction::power(gen::alpha(g));
    const double x = gen::log_uniform(g, 1e-3, 1e3);
    const double y = gen::log_uniform(g, 1e-3, 1e3);
    CHECK(f.renewal_v(x) * f.renewal_v(x) == Approx(f(x)).epsilon(1e-13));
    CHECK(f.renewal_v(x + y) <= (f.renewal_v(x) + f.renewal_v(y)) * (1.0 + 1e-13));
  }
}
