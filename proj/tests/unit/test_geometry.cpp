#include <doctest.h>

#include <cmath>

#include "aniso/errors.hpp"
#include "aniso/geometry.hpp"
#include "generators.hpp"

using aniso::Domain;
using aniso::Point;
using doctest::Approx;

TEST_CASE("distance to the boundary") {
  const auto ball = Domain::ball({0.0, 0.0}, 1.0);
  auto d = ball.dist_to_boundary(Point{0.5, 0.0});
  CHECK(d.inside);
  CHECK(d.value == Approx(0.5));
  d = ball.dist_to_boundary(Point{2.0, 0.0});
  CHECK_FALSE(d.inside);
  CHECK(d.value == 0.0);

  const auto half = Domain::half_space(3, 2);
  d = half.dist_to_boundary(Point{4.0, -7.0, 0.3});
  CHECK(d.inside);
  CHECK(d.value == Approx(0.3));

  gen::Engine g(2);
  for (int k = 0; k < 1000; ++k) {
    const Point c = gen::point(g, 3, -1.0, 1.0);
    const double r = gen::uniform(g, 0.1, 2.0);
    const auto b = Domain::ball(c, r);
    const Point x = gen::point_in_ball(g, c, r);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
    CHECK(b.dist_to_boundary(x).value == Approx(std::abs(r - std::sqrt(s))).epsilon(1e-14));
    CHECK(b.contains(x) == (b.dist_to_boundary(x).value > 0.0));
  }
}

TEST_CASE("C11 characteristics") {
  CHECK(Domain::ball({0.0, 0.0}, 0.4).c11_chars().R <= 0.4);
  CHECK(Domain::annulus({0.0, 0.0}, 1.0, 3.0).c11_chars().R <= 1.0);
  CHECK(Domain::annulus({0.0, 0.0}, 1.0, 1.5).c11_chars().R <= 0.25);
  CHECK_THROWS_AS(Domain::full_space(2).c11_chars(), aniso::NoBoundaryError);
  const auto box = Domain::rounded_box({0.0, 0.0}, {1.0, 0.5}, 0.2).c11_chars();
  CHECK(box.R <= 0.2);
  CHECK(box.diam > 0.0);
}

TEST_CASE("corner paths") {
  const Point x{0.0, 0.0}, y{1.0, 2.0};
  const std::vector<std::size_t> p12{0, 1}, p21{1, 0};
  auto cp = aniso::corner_path(x, y, p12);
  REQUIRE(cp.points.size() == 3);
  CHECK(cp.points[1] == Point{1.0, 0.0});
  CHECK(cp.points[2] == y);
  cp = aniso::corner_path(x, y, p21);
  CHECK(cp.points[1] == Point{0.0, 2.0});
  cp = aniso::corner_path(x, x, p21);
  for (const auto& p : cp.points) CHECK(p == x);
  const std::vector<std::size_t> bad{0, 0};
  CHECK_THROWS_AS(aniso::corner_path(x, y, bad), aniso::ArgumentError);
  const std::vector<std::size_t> short_perm{0};
  CHECK_THROWS_AS(aniso::corner_path(x, y, short_perm), aniso::ArgumentError);
}

TEST_CASE("corner path coordinates follow the ordering rule") {
  gen::Engine g(17);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t d = 1 + gen::index(g, 6);
    const Point x = gen::point(g, d, -5.0, 5.0);
    const Point y = gen::point(g, d, -5.0, 5.0);
    const auto perm = gen::permutation(g, d);
    const auto cp = aniso::corner_path(x, y, perm);
    REQUIRE(cp.points.size() == d + 1);
    for (std::size_t l = 0; l <= d; ++l) {
      for (std::size_t k2 = 0; k2 < d; ++k2) {
        const std::size_t i = perm[k2];
        CHECK(cp.points[l][i] == (k2 < l ? y[i] : x[i]));
      }
    }
  }
}

TEST_CASE("D_gamma on simple shapes") {
  gen::Engine g(23);
  std::vector<aniso::PointPair> pairs;
  for (int k = 0; k < 200; ++k) {
    Point x = gen::point(g, 2, -3.0, 3.0), y = gen::point(g, 2, -3.0, 3.0);
    x[1] = std::abs(x[1]) + 1e-3;
    y[1] = std::abs(y[1]) + 1e-3;
    pairs.push_back({x, y});
  }
  CHECK(aniso::check_d_gamma(Domain::half_space(2, 1), 1.0, pairs).passed);
  CHECK(aniso::check_d_gamma(Domain::full_space(2), 0.7, pairs).passed);
  CHECK_THROWS_AS(aniso::check_d_gamma(Domain::half_space(2, 1), 1.5, pairs), aniso::ArgumentError);

  std::vector<aniso::PointPair> big{{Point(7, 0.1), Point(7, 0.2)}};
  CHECK_THROWS_AS(aniso::check_d_gamma(Domain::half_space(7, 6), 1.0, big),
                  aniso::CombinatorialLimitError);
}

TEST_CASE("D_gamma is monotone in gamma") {
  gen::Engine g(29);
  const auto ann = Domain::annulus({0.0, 0.0}, 1.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    Point x, y;
    do x = gen::point(g, 2, -2.0, 2.0); while (!ann.contains(x));
    do y = gen::point(g, 2, -2.0, 2.0); while (!ann.contains(y));
    const std::vector<aniso::PointPair> one{{x, y}};
    const double gamma = gen::uniform(g, 0.05, 1.0);
    if (aniso::check_d_gamma(ann, gamma, one).passed) {
      CHECK(aniso::check_d_gamma(ann, gamma * gen::uniform(g, 0.1, 1.0), one).passed);
    }
  }
}

TEST_CASE("boundary chart of a ball and a half-space") {
  const auto half = Domain::half_space(2, 1);
  CHECK(aniso::rho_q(half, Point{0.3, 0.0}, Point{0.4, 0.2}) == Approx(0.2));
  CHECK(aniso::in_boundary_box(half, Point{0.0, 0.0}, 1.0, 1.0, Point{0.0, 0.5}));
  CHECK_FALSE(aniso::in_boundary_box(half, Point{0.0, 0.0}, 1.0, 1.0, Point{0.0, 1.5}));

  const auto ball = Domain::ball({0.0, 0.0, 0.0}, 1.0);
  CHECK(aniso::rho_q(ball, Point{0.0, 0.0, -1.0}, Point{0.0, 0.0, -1.0 + 0.3}) == Approx(0.3));

  const auto disc = Domain::ball({0.0, 0.0}, 1.0);
  const Point q{0.0, -1.0}, y{0.1, -0.9};
  const double lam = disc.c11_chars().lambda;
  const double rho = aniso::rho_q(disc, q, y);
  const double delta = disc.depth(y);
  CHECK(rho >= delta);
  CHECK(rho <= std::sqrt(1.0 + lam * lam) * delta);
  // Sphere chart: height above the tangent plane minus the circle's sag at |y~| = 0.1.
  CHECK(rho == Approx(0.1 - (1.0 - std::sqrt(1.0 - 0.01))).epsilon(1e-13));
  CHECK(aniso::in_boundary_box(disc, q, 0.2, 0.2, Point{0.05, -0.9}));
  CHECK_THROWS_AS(aniso::rho_q(disc, q, Point{0.0, 0.9}), aniso::RangeError);
}

TEST_CASE("chart sandwich on sampled points") {
  gen::Engine g(31);
  const std::vector<Domain> shapes{Domain::ball({0.0, 0.0}, 1.0), Domain::annulus({0.0, 0.0}, 1.0, 2.0),
                                   Domain::rounded_box({0.0, 0.0}, {1.0, 0.6}, 0.3),
                                   Domain::half_space(2, 1)};
  for (const auto& dom : shapes) {
    const auto ch = dom.c11_chars();
    const double R = std::isfinite(ch.R) ? ch.R : 1.0;
    const double lam = ch.lambda;
    int checked = 0;
    while (checked < 10000) {
      const Point x = gen::point(g, 2, -2.5, 2.5);
      if (!dom.contains(x) || dom.depth(x) > 0.5 * R) continue;
      const Point q = dom.project_to_boundary(x);
      // Perturb tangentially so that y is not on the normal through q.
      Point y = x;
      y[0] += gen::uniform(g, -0.2, 0.2) * R;
      double dist = 0.0;
      for (std::size_t i = 0; i < 2; ++i) dist += (y[i] - q[i]) * (y[i] - q[i]);
      if (!dom.contains(y) || std::sqrt(dist) >= 0.9 * R) continue;
      const double rho = aniso::rho_q(dom, q, y);
      const double delta = dom.depth(y);
      CHECK(rho / std::sqrt(1.0 + lam * lam) <= delta * (1.0 + 1e-9) + 1e-12);
      CHECK(delta <= rho * (1.0 + 1e-9) + 1e-12);
      ++checked;
    }
  }
}
