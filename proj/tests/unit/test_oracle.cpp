#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aniso/bounds.hpp"
#include "aniso/oracle.hpp"
#include "generators.hpp"

using aniso::Point;
using aniso::ScaleFunction;
using aniso::TransitionDensity1D;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Cauchy density with scale s.
double cauchy(double s, double z) { return s / (kPi * (s * s + z * z)); }

}  // namespace

TEST_CASE("one-dimensional density, Cauchy case") {
  const auto f = ScaleFunction::power(1.0);
  CHECK(std::abs(aniso::density_1d(f, 1.0, 0.0) - 1.0 / (kPi * kPi)) < 1e-4);
  CHECK(std::abs(aniso::density_1d(f, 1.0, kPi) - 1.0 / (2.0 * kPi * kPi)) < 1e-4);
  const TransitionDensity1D p(f, 0.4);
  for (double z : {0.0, 0.1, 1.0, 3.0, 25.0, 400.0}) {
    CHECK(p.density(z) == Approx(cauchy(kPi * 0.4, z)).epsilon(1e-6));
    CHECK(p.cdf(z) == Approx(0.5 + std::atan(z / (kPi * 0.4)) / kPi).epsilon(1e-7));
  }
  CHECK(p.density(-2.0) == Approx(p.density(2.0)).epsilon(1e-12));
}

TEST_CASE("densities are normalised and self-similar") {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const TransitionDensity1D p(f, 1.0);
    CHECK(p.cdf(0.0) == Approx(0.5).epsilon(1e-9));
    // Mass beyond |z| is 2 t N(z) = 2 z^-a / a to leading order.
    const double z = 1e8;
    const double tails = 2.0 * std::pow(z, -a) / a;
    CHECK(std::abs(p.cdf(z) - p.cdf(-z) + tails - 1.0) < 1e-6);
    CHECK(p.cdf(-z) == Approx(tails / 2.0).epsilon(1e-3));
    // p(t, z) = t^{-1/a} p(1, t^{-1/a} z).
    const TransitionDensity1D q(f, 3.0);
    const double s = std::pow(3.0, -1.0 / a);
    for (double z : {0.0, 0.5, 2.0}) CHECK(q.density(z) == Approx(s * p.density(s * z)).epsilon(1e-6));
  }
  const TransitionDensity1D pl(ScaleFunction::power_log(1.0, 0.5), 0.5);
  // phi(r) = r beyond 1, so the tails are Cauchy-like: 2 t / z in total.
  CHECK(std::abs(pl.box_average(-1e8, 1e8) * 2e8 + 2.0 * 0.5 / 1e8 - 1.0) < 1e-6);
}

TEST_CASE("product density") {
  const auto f = ScaleFunction::power(1.0);
  CHECK(std::abs(aniso::product_density(f, 1.0, Point{0.2, -0.1}, Point{0.2, -0.1}) - 1.0 / std::pow(kPi, 4)) <
        2e-4);
  const TransitionDensity1D p(f, 1.0);
  gen::Engine g(51);
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = 1 + gen::index(g, 3);
    const Point x = gen::point(g, d, -2.0, 2.0), y = gen::point(g, d, -2.0, 2.0);
    const double v = aniso::product_density(p, x, y);
    const auto perm = gen::permutation(g, d);
    Point px(d), py(d);
    for (std::size_t i = 0; i < d; ++i) {
      px[i] = x[perm[i]];
      py[i] = y[perm[i]];
    }
    CHECK(aniso::product_density(p, px, py) == Approx(v).epsilon(1e-13));
    double prod = 1.0;
    for (std::size_t i = 0; i < d; ++i) prod *= cauchy(kPi, x[i] - y[i]);
    CHECK(v == Approx(prod).epsilon(1e-6));
  }
  const std::vector<double> h{1e-4, 1e-4};
  CHECK(aniso::product_box_average(p, Point{0.0, 0.0}, Point{0.3, 0.1}, h) ==
        Approx(aniso::product_density(p, Point{0.0, 0.0}, Point{0.3, 0.1})).epsilon(1e-6));
}

TEST_CASE("density against the whole-space bound on a 5x5 grid") {
  const std::vector<double> diffs{0.0, 0.25, 0.5, 1.0, 2.0};
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    std::vector<double> ratios;
    for (double t : {0.25, 1.0}) {
      const TransitionDensity1D p(f, t);
      const double s = f.inverse(t);
      for (double u : diffs) {
        for (double v : diffs) {
          const Point x{0.0, 0.0}, y{u * s, v * s};
          ratios.push_back(aniso::product_density(p, x, y) / aniso::hke_bound(f, t, x, y));
        }
      }
    }
    CHECK(aniso::SandwichWindow::fit(ratios).spread() <= 30.0);
  }
}

TEST_CASE("generator of the boundary profile") {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const aniso::PointFunction w = [a](std::span<const double> u) {
      return std::pow(std::max(u.back(), 0.0), a / 2.0);
    };
    const Point x{0.3, 1.0};
    CHECK(std::abs(aniso::generator_pv(f, w, x, 1).value) < 1e-4);
    CHECK(std::abs(aniso::generator_pv(f, w, x, 0).value) < 1e-4);
    const aniso::PointFunction c = [](std::span<const double>) { return 2.5; };
    CHECK(aniso::generator_pv(f, c, x, 1).value == 0.0);
  }
  // w(u) = u^+ with a = 1.5: only jumps below zero contribute,
  // \int_1^inf (tau - 1) tau^{-5/2} dtau = 2 - 2/3.
  const auto f = ScaleFunction::power(1.5);
  const aniso::PointFunction lin = [](std::span<const double> u) { return std::max(u.back(), 0.0); };
  CHECK(aniso::generator_pv(f, lin, Point{1.0}, 0).value == Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("Chapman-Kolmogorov") {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const TransitionDensity1D ps(f, 0.4), pt(f, 0.6), pst(f, 1.0);
    for (double z : {0.0, 0.7, 2.0}) {
      // |u| > 50 carries about 1e-4 for a = 0.5 and far less otherwise.
      auto g = [&](double u) { return ps.density(z - u) * pt.density(u); };
      boost::math::quadrature::tanh_sinh<double> ts;
      const double sum = ts.integrate(g, -50.0, 0.0, 1e-9) + ts.integrate(g, 0.0, std::max(z, 1e-3), 1e-9) +
                         ts.integrate(g, std::max(z, 1e-3), 50.0, 1e-9);
      CHECK(std::abs(sum - pst.density(z)) < 1e-3);
    }
  }
}
