#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aniso/simulate.hpp"
#include "aniso/stats.hpp"
#include "generators.hpp"

using aniso::Domain;
using aniso::JumpLaw;
using aniso::KappaSpec;
using aniso::Point;
using aniso::Rng;
using aniso::ScaleFunction;
using aniso::SimConfig;
using doctest::Approx;

namespace {

template <class Cdf>
double ks_one_sample(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = cdf(xs[k]);
    d = std::max({d, std::abs(f - k / n), std::abs((k + 1) / n - f)});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double quantile(std::vector<double> xs, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(xs.size()));
  std::nth_element(xs.begin(), xs.begin() + k, xs.end());
  return xs[k];
}

// Open box (-w, w)^{d-1} x (0, h) for exit decompositions near a flat boundary.
struct BoxRegion {
  std::size_t d;
  double w;
  double h;
  std::size_t dim() const { return d; }
  double depth(std::span<const double> x) const {
    double m = std::min(x[d - 1], h - x[d - 1]);
    for (std::size_t i = 0; i + 1 < d; ++i) m = std::min(m, w - std::abs(x[i]));
    return m;
  }
};

bool same_result(const aniso::KilledPathResult& a, const aniso::KilledPathResult& b) {
  return a.exited == b.exited && a.exit_time == b.exit_time && a.exit_by_jump == b.exit_by_jump &&
         a.exit_position == b.exit_position && a.pre_exit_position == b.pre_exit_position &&
         a.position == b.position && a.jumps == b.jumps && a.steps == b.steps;
}

}  // namespace

TEST_CASE("per-path generators") {
  Rng a = aniso::path_rng(7, 3, 11), b = aniso::path_rng(7, 3, 11);
  CHECK(a() == b());
  CHECK(aniso::path_rng(7, 3, 11)() != aniso::path_rng(7, 3, 12)());
  CHECK(aniso::path_rng(7, 3, 11)() != aniso::path_rng(7, 4, 11)());
  CHECK(aniso::path_rng(7, 3, 11)() != aniso::path_rng(8, 3, 11)());
  for (int k = 0; k < 1000; ++k) {
    const double u = aniso::uniform_open(a);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("zero time step") {
  Rng rng(1);
  for (double a : {0.5, 1.0, 1.5}) CHECK(aniso::sample_stable_increment(a, 0.0, rng) == 0.0);
  const JumpLaw law(ScaleFunction::power_log(1.0, 0.5), 1e-3, 1e-2);
  CHECK(aniso::sample_general_increment(law, 0.0, 1e-3, rng) == 0.0);
  CHECK_THROWS_AS(aniso::sample_general_increment(law, -1.0, 1e-3, rng), aniso::DomainError);
  CHECK_THROWS_AS(aniso::sample_general_increment(law, 1.0, 0.5, rng), aniso::RangeError);
  CHECK_THROWS_AS(aniso::sample_stable_increment(2.0, 1.0, rng), aniso::DomainError);
}

TEST_CASE("Cauchy marginal") {
  const double t = 0.7;
  Rng rng(99);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = aniso::sample_stable_increment(1.0, t, rng);
  const double s = std::numbers::pi * t;
  const double d = ks_one_sample(xs, [s](double z) { return 0.5 + std::atan(z / s) / std::numbers::pi; });
  CHECK(d < 0.01);
}

TEST_CASE("stable self-similarity of quantiles") {
  Rng rng(5);
  std::vector<double> a(1000000), b(1000000);
  for (auto& x : a) x = aniso::sample_stable_increment(1.5, 0.1, rng);
  for (auto& x : b) x = aniso::sample_stable_increment(1.5, 0.2, rng);
  CHECK(quantile(b, 0.9) / quantile(a, 0.9) == Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(0.05));
}

TEST_CASE("general sampler agrees with the stable sampler") {
  for (double a : {0.7, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const JumpLaw law(f, 1e-3, 1e-3);
    Rng rng(static_cast<std::uint64_t>(a * 100));
    std::vector<double> g(100000), s(100000);
    // About 2 N(eps) dt jumps per draw; keep that below a thousand.
    const double dt = a > 1.0 ? 0.02 : 0.2;
    for (auto& x : g) x = aniso::sample_general_increment(law, dt, 1e-3, rng);
    for (auto& x : s) x = aniso::sample_stable_increment(a, dt, rng);
    CHECK(ks_two_sample(g, s) < 0.015);
  }
}

TEST_CASE("jump law tables") {
  const auto f = ScaleFunction::power_log(1.0, 0.5);
  const JumpLaw law(f, 1e-4, 0.05);
  double prev = 0.0;
  for (double eps : aniso::geometric_grid(1e-4, 0.05, 30)) {
    CHECK(law.tail_mass(eps) == Approx(f.tail_mass(eps)).epsilon(1e-8));
    CHECK(law.small_variance(eps) == Approx(2.0 * f.small_jump_moment(eps)).epsilon(1e-8));
    CHECK(law.small_variance(eps) > prev);
    prev = law.small_variance(eps);
  }
  // Sampled magnitudes follow the conditional tail N(r) / N(eps).
  Rng rng(3);
  const double eps = 1e-3;
  std::vector<double> r(50000);
  for (auto& v : r) v = law.sample_magnitude(eps, rng);
  // The table itself was checked against direct integrals above.
  const double ne = law.tail_mass(eps);
  // Mass beyond 1e6 is below 1e-8 of N(eps).
  CHECK(ks_one_sample(r, [&](double x) { return x > 1e6 ? 1.0 : 1.0 - law.tail_mass(x) / ne; }) < 0.01);
  const JumpLaw stable(ScaleFunction::power(1.0), 1e-3, 1e-3);
  CHECK(stable.tail_mass(0.5) == Approx(2.0));
  CHECK(stable.small_variance(0.5) == Approx(1.0));
}

TEST_CASE("killed paths: trivial cases and determinism") {
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-3, 0.05);
  SimConfig cfg;
  cfg.horizon = 2.0;
  const Point x0{0.1, -0.2};
  const auto free = Domain::full_space(2);
  for (std::uint64_t p = 0; p < 50; ++p) {
    const auto r = aniso::simulate_killed_path(free, KappaSpec::one(), law, x0, cfg, p);
    CHECK(r.alive());
    CHECK(r.position.size() == 2);
  }
  const auto ball = Domain::ball({0.0, 0.0}, 0.5);
  const auto out = aniso::simulate_killed_path(ball, KappaSpec::one(), law, Point{1.0, 0.0}, cfg, 0);
  CHECK(out.exited);
  CHECK(out.exit_time == 0.0);
  CHECK(out.exit_position == Point{1.0, 0.0});

  for (std::uint64_t p = 0; p < 50; ++p) {
    const auto a = aniso::simulate_killed_path(ball, KappaSpec::cosine(0.3, 2.0), law, x0, cfg, p);
    const auto b = aniso::simulate_killed_path(ball, KappaSpec::cosine(0.3, 2.0), law, x0, cfg, p);
    CHECK(same_result(a, b));
  }
}

TEST_CASE("exits by jump are axis-aligned") {
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-3, 0.05);
  SimConfig cfg;
  cfg.horizon = 10.0;
  const auto ball = Domain::ball({0.0, 0.0, 0.0}, 1.0);
  int by_jump = 0;
  for (std::uint64_t p = 0; p < 2000; ++p) {
    const auto r = aniso::simulate_killed_path(ball, KappaSpec::one(), law, Point{0.2, 0.1, -0.3}, cfg, p);
    REQUIRE(r.exited);
    CHECK_FALSE(ball.contains(r.exit_position));
    CHECK(ball.contains(r.pre_exit_position));
    if (!r.exit_by_jump) continue;
    ++by_jump;
    int changed = 0;
    for (std::size_t i = 0; i < 3; ++i) changed += r.exit_position[i] != r.pre_exit_position[i];
    CHECK(changed == 1);
  }
  CHECK(by_jump > 1800);
}

TEST_CASE("thinning keeps c / kappa0 of the proposals") {
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-3, 0.05);
  SimConfig cfg;
  cfg.horizon = 10.0;
  const double c = 0.5, kappa0 = 2.0;
  const auto kappa = KappaSpec::constant_value(c, kappa0);
  const auto free = Domain::full_space(2);
  double accepted = 0.0;
  const std::size_t n = 1000;
  for (std::uint64_t p = 0; p < n; ++p) {
    accepted += static_cast<double>(
        aniso::simulate_killed_path(free, kappa, law, Point{0.0, 0.0}, cfg, p).jumps);
  }
  // Majorant: kappa0 * 2 N(eps_max) per axis; 1.6e6 proposals in total.
  const double proposals = kappa0 * 2.0 * law.tail_mass(0.05) * 2.0 * cfg.horizon * static_cast<double>(n);
  CHECK(proposals > 1e6);
  CHECK(accepted / proposals == Approx(c / kappa0).epsilon(0.02));
}

TEST_CASE("coordinate exchangeability in a ball") {
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-3, 0.05);
  SimConfig cfg;
  cfg.horizon = 20.0;
  const auto ball = Domain::ball({0.0, 0.0}, 1.0);
  aniso::MeanAccumulator a, b;
  for (std::uint64_t p = 0; p < 20000; ++p) {
    a.add(aniso::simulate_killed_path(ball, KappaSpec::one(), law, Point{0.6, 0.1}, cfg, p).exit_time);
    cfg.stream = 1;
    b.add(aniso::simulate_killed_path(ball, KappaSpec::one(), law, Point{0.1, 0.6}, cfg, p).exit_time);
    cfg.stream = 0;
  }
  CHECK(std::abs(a.mean() - b.mean()) < 3.0 * std::hypot(a.std_error(), b.std_error()));
}

TEST_CASE("exit decomposition") {
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-4, 0.05);
  SimConfig cfg;
  cfg.horizon = 50.0;
  const auto ball = Domain::ball({0.0, 0.0}, 1.0);
  std::vector<aniso::KilledPathResult> res;
  for (std::uint64_t p = 0; p < 200; ++p) {
    res.push_back(aniso::simulate_killed_path(ball, KappaSpec::one(), law, Point{0.0, 0.0}, cfg, p));
  }
  const std::vector<aniso::RegionPredicate> outside{[&](std::span<const double> x) { return !ball.contains(x); }};
  const auto all = aniso::exit_decomposition(res, outside);
  CHECK(all.front().frequency == 1.0);
  const std::vector<aniso::RegionPredicate> none{[](std::span<const double>) { return false; }};
  const auto zero = aniso::exit_decomposition(res, none);
  CHECK(zero.front().frequency == 0.0);
  CHECK(zero.front().hits == 0);
}

TEST_CASE("landing above the box scales like V(delta)") {
  // Exit from U = (-s, s) x (0, s / lam) near the flat boundary, landing in
  // (-s, s) x [s / lam, s).
  const double s = 1.0, lam = 4.0;
  const auto f = ScaleFunction::power(1.0);
  const JumpLaw law(f, 1e-4, 0.05);
  SimConfig cfg;
  cfg.horizon = 50.0;
  cfg.eps_small_jump = 1e-4;
  const BoxRegion box{2, s, s / lam};
  const std::vector<aniso::RegionPredicate> upper{[&](std::span<const double> x) {
    return std::abs(x[0]) < s && x[1] >= s / lam && x[1] < s;
  }};
  std::vector<double> freq;
  for (double delta : {0.01, 0.0025}) {
    std::vector<aniso::KilledPathResult> res;
    res.reserve(100000);
    cfg.stream = delta == 0.01 ? 0 : 1;
    for (std::uint64_t p = 0; p < 100000; ++p) {
      res.push_back(aniso::simulate_killed_path(box, KappaSpec::one(), law, Point{0.0, delta}, cfg, p));
    }
    freq.push_back(aniso::exit_decomposition(res, upper).front().frequency);
  }
  CHECK(freq[1] / freq[0] == Approx(0.5).epsilon(0.2));
}
