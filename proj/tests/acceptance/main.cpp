// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aniso/bounds.hpp"
#include "aniso/config.hpp"
#include "aniso/estimate.hpp"
#include "aniso/experiments.hpp"
#include "aniso/geometry.hpp"
#include "aniso/oracle.hpp"
#include "aniso/simulate.hpp"

using namespace aniso;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double summary_value(const RunResult& r, const std::string& key) {
  for (const auto& [k, v] : r.summary) {
    if (k == key) return std::stod(v);
  }
  return std::nan("");
}

double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
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

Simulator stable_sim(double alpha, double horizon, std::uint64_t seed) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return Simulator(ScaleFunction::power(alpha), KappaSpec::one(), cfg);
}

Outcome oracle_exactness() {
  const double err = std::abs(density_1d(ScaleFunction::power(1.0), 1.0, 0.0) - 1.0 / (kPi * kPi));
  double worst = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const TransitionDensity1D ps(f, 0.4), pt(f, 0.6), pst(f, 1.0);
    for (double z : {0.0, 0.7, 2.0}) {
      auto g = [&](double u) { return ps.density(z - u) * pt.density(u); };
      boost::math::quadrature::tanh_sinh<double> ts;
      const double m = std::max(z, 1e-3);
      const double sum = ts.integrate(g, -50.0, 0.0, 1e-8) + ts.integrate(g, 0.0, m, 1e-8) +
                         ts.integrate(g, m, 50.0, 1e-8);
      worst = std::max(worst, std::abs(sum - pst.density(z)));
    }
  }
  return {err < 1e-4 && worst < 1e-3, "density error " + fmt(err) + ", CK residual " + fmt(worst)};
}

Outcome sampler_law() {
  const std::size_t n = 100000;
  const double t = 1.0;
  const auto cauchy = [t](double z) { return 0.5 + std::atan(z / (kPi * t)) / kPi; };
  // Chambers-Mallows-Stuck route and the exact inverse-cdf route at alpha = 1.
  std::vector<double> cms(n), inv(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng = path_rng(11, 0, k);
    cms[k] = sample_stable_increment(1.0, t, rng);
    inv[k] = kPi * t * std::tan(kPi * (uniform_open(rng) - 0.5));
  }
  const double ks_cms = ks_one_sample(cms, cauchy);
  const double ks_inv = ks_one_sample(inv, cauchy);
  double ks_gen = 0.0;
  for (double a : {0.7, 1.0, 1.5}) {
    const JumpLaw law(ScaleFunction::power(a), 1e-3, 1e-3);
    const double dt = a > 1.0 ? 0.02 : 0.2;
    std::vector<double> g(n), s(n);
    for (std::size_t k = 0; k < n; ++k) {
      Rng rng = path_rng(12, static_cast<std::uint64_t>(a * 10), k);
      g[k] = sample_general_increment(law, dt, 1e-3, rng);
      s[k] = sample_stable_increment(a, dt, rng);
    }
    ks_gen = std::max(ks_gen, ks_two_sample(g, s));
  }
  return {ks_cms < 0.01 && ks_inv < 0.01 && ks_gen < 0.015,
          "KS Cauchy " + fmt(ks_cms) + " (inverse cdf " + fmt(ks_inv) + "), general vs stable " +
              fmt(ks_gen)};
}

Outcome whole_space_sandwich() {
  const std::vector<double> diffs{0.0, 0.25, 0.5, 1.0, 2.0};
  double spread = 0.0, worst_rel = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const Simulator sim = stable_sim(a, 20.0, 21);
    std::vector<double> ratios;
    std::uint64_t stream = 0;
    for (double t : {0.25, 1.0}) {
      const TransitionDensity1D p(f, t);
      const double s = f.inverse(t);
      // Box of a quarter of the law's own width (c_alpha t)^(1/alpha); in units of
      // phi^-1(t) alone the alpha = 0.5 boxes see about a hundred hits at n = 1e6.
      const double w = 0.25 * std::pow(stable_constant(a) * t, 1.0 / a);
      const std::vector<double> h{w, w};
      for (double u : diffs) {
        for (double v : diffs) {
          const Point x{0.0, 0.0}, y{u * s, v * s};
          ratios.push_back(product_density(p, x, y) / hke_bound(f, t, x, y));
          if (u <= 0.25 && v <= 0.25) {
            const MCEstimate e = mc_heat_kernel_free(sim.with_stream(stream++), t, x, y, h, 1000000);
            const double exact = product_box_average(p, x, y, h);
            worst_rel = std::max(worst_rel, std::abs(e.value / exact - 1.0));
          }
        }
      }
    }
    spread = std::max(spread, SandwichWindow::fit(ratios).spread());
  }
  return {spread <= 30.0 && worst_rel < 0.1,
          "max window spread " + fmt(spread) + ", max MC relative error " + fmt(worst_rel)};
}

Outcome exit_time() {
  const RunResult r = run_experiment(preset_config("stable-ball-exit"));
  const double dev = summary_value(r, "scaling_max_relative_deviation");
  const double ratio = summary_value(r, "a_ratio");
  return {dev <= 0.1 && ratio <= 20.0 && r.verdict == Verdict::pass,
          "scaling deviation " + fmt(dev) + ", a2/a1 " + fmt(ratio) + ", verdict " + to_string(r.verdict)};
}

Outcome survival_exponent() {
  const RunResult r = run_experiment(preset_config("stable-halfspace-d1"));
  const double slope = summary_value(r, "slope");
  return {std::abs(slope - 0.5) <= 0.1, "slope " + fmt(slope) + " +- " + fmt(summary_value(r, "slope_se"))};
}

Outcome boundary_factorization() {
  const RunResult r = run_experiment(preset_config("stable-ball-dhke"));
  const double slope = summary_value(r, "t0_slope");
  const double above = summary_value(r, "t0_killed_above_free");
  return {std::abs(slope - 1.0) <= 0.2 && above == 0.0,
          "slope " + fmt(slope) + " +- " + fmt(summary_value(r, "t0_slope_se")) + ", killed above free " +
              fmt(above)};
}

Outcome near_diagonal_lower() {
  const auto f = ScaleFunction::power(1.0);
  const Domain ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  const Simulator sim = stable_sim(1.0, 2.0, 31);
  double zeta3 = INFINITY;
  std::uint64_t stream = 0;
  for (const Point& x : {Point{0.0, 0.0}, Point{0.2, -0.2}}) {
    for (double t : {0.0625, 0.125, 0.25}) {
      const double s = f.inverse(t);
      const std::vector<double> h{0.1 * s, 0.1 * s};
      for (double u : {0.0, 0.25, 0.5}) {
        for (double v : {0.0, 0.25, 0.5}) {
          const Point y{x[0] + u * s, x[1] + v * s};
          const MCEstimate e = mc_heat_kernel(sim.with_stream(stream++), ball, t, x, y, h, 200000);
          zeta3 = std::min(zeta3, (e.value - 3.0 * e.std_error) * s * s);
        }
      }
    }
  }
  return {zeta3 >= 1e-3, "min of (p - 3 se) phi^-1(t)^2 " + fmt(zeta3)};
}

Outcome eigenvalue_regime() {
  const ExperimentConfig base = preset_config("stable-ball-d2");
  std::vector<double> scaled;
  double r2 = 1.0, spread = 0.0, profile = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    ExperimentConfig c = base;
    c.domain = Domain::ball(Point{0.0, 0.0}, r);
    for (auto& x : c.x) {
      for (auto& v : x) v *= r;
    }
    for (auto& t : c.t) t *= r;  // phi(r) = r
    for (auto& d : c.depths) d *= r;
    const RunResult res = run_experiment(c);
    scaled.push_back(summary_value(res, "lambda") * r);
    r2 = std::min(r2, summary_value(res, "r2"));
    spread = std::max(spread, summary_value(res, "lambda_per_x_spread"));
    if (r == 1.0) profile = summary_value(res, "profile_slope");
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  const double constancy = *hi / *lo - 1.0;
  return {r2 >= 0.95 && spread <= 0.05 && std::abs(profile - 0.5) <= 0.15 && constancy <= 0.15,
          "R2 " + fmt(r2) + ", per-x spread " + fmt(spread) + ", profile slope " + fmt(profile) +
              ", lambda phi(r) variation " + fmt(constancy)};
}

Outcome green_sandwich() {
  ExperimentConfig c = preset_config("stable-ball-green");
  const RunResult scales = run_experiment(c);
  const double spread = summary_value(scales, "window_spread");
  c.x.resize(1);
  c.y.resize(1);
  c.depths = {0.01, 0.02, 0.04, 0.08, 0.16};
  const RunResult boundary = run_experiment(c);
  const double slope = summary_value(boundary, "boundary_slope");
  const RunResult one = run_experiment(preset_config("stable-interval-d1"));
  const double spread1 = summary_value(one, "window_spread");
  return {spread <= 50.0 && std::abs(slope - 0.5) <= 0.15 && spread1 <= 30.0,
          "d=2 spread " + fmt(spread) + ", boundary slope " + fmt(slope) + ", d=1 spread " + fmt(spread1)};
}

Outcome generator_identity() {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto f = ScaleFunction::power(a);
    const PointFunction w = [a](std::span<const double> u) { return std::pow(std::max(u.back(), 0.0), a / 2.0); };
    for (double h : geometric_grid(0.1, 10.0, 9)) {
      for (std::size_t axis : {0, 1}) {
        worst = std::max(worst, std::abs(generator_pv(f, w, Point{0.3, h}, axis).value));
      }
    }
  }
  return {worst < 1e-4, "max |generator| " + fmt(worst)};
}

Outcome dgamma_checker() {
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(-3.0, 3.0), unit(-1.0, 1.0);
  std::vector<PointPair> half, disc;
  while (half.size() < 1000) {
    half.push_back({Point{u(g), std::abs(u(g)) + 1e-3}, Point{u(g), std::abs(u(g)) + 1e-3}});
  }
  while (disc.size() < 1000) {
    const Point x{unit(g), unit(g)}, y{unit(g), unit(g)};
    if (std::hypot(x[0], x[1]) < 1.0 && std::hypot(y[0], y[1]) < 1.0) disc.push_back({x, y});
  }
  const bool h_ok = check_d_gamma(Domain::half_space(2, 1), 1.0, half).passed;
  const bool b_ok = check_d_gamma(Domain::ball(Point{0.0, 0.0}, 1.0), 0.5, disc).passed;
  std::size_t bad = 0;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t d = 1 + g() % 6;
    Point x(d), y(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = u(g);
      y[i] = u(g);
    }
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), g);
    const CornerPath cp = corner_path(x, y, order);
    if (cp.points.size() != d + 1) {
      ++bad;
      continue;
    }
    for (std::size_t l = 0; l <= d; ++l) {
      for (std::size_t k2 = 0; k2 < d; ++k2) {
        const std::size_t i = order[k2];
        if (cp.points[l][i] != (k2 < l ? y[i] : x[i])) ++bad;
      }
    }
  }
  return {h_ok && b_ok && bad == 0, std::string("half-space ") + (h_ok ? "ok" : "failed") + ", disc " +
                                        (b_ok ? "ok" : "failed") + ", corner-path mismatches " +
                                        std::to_string(bad)};
}

Outcome reproducibility() {
  ExperimentConfig c = preset_config("stable-free-d2");
  const std::string a = format_csv(c, run_experiment(c));
  const std::string b = format_csv(c, run_experiment(c));
  c.threads = 2;
  const std::string t2 = format_csv(c, run_experiment(c));
  const ExperimentConfig k = preset_config("stable-halfspace-d1");
  const bool killed = format_csv(k, run_experiment(k)) == format_csv(k, run_experiment(k));
  return {a == b && a == t2 && killed, std::string("free rerun ") + (a == b ? "identical" : "differs") +
                                           ", threads 2 " + (a == t2 ? "identical" : "differs") +
                                           ", killed rerun " + (killed ? "identical" : "differs")};
}

struct Criterion {
  int id;
  const char* name;
  double max_seconds;  // 0: no limit stated
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "oracle exactness", 10, oracle_exactness},
      {2, "sampler law", 60, sampler_law},
      {3, "whole-space sandwich", 300, whole_space_sandwich},
      {4, "exit-time comparability", 0, exit_time},
      {5, "survival boundary exponent", 180, survival_exponent},
      {6, "Dirichlet boundary-decay factorization", 600, boundary_factorization},
      {7, "near-diagonal lower bound", 0, near_diagonal_lower},
      {8, "eigenvalue regime", 900, eigenvalue_regime},
      {9, "Green sandwich", 0, green_sandwich},
      {10, "generator identity", 30, generator_identity},
      {11, "D_gamma checker", 0, dgamma_checker},
      {12, "reproducibility", 0, reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    if (c.max_seconds > 0 && secs > c.max_seconds) {
      pass = false;
      o.detail += ", over the " + fmt(c.max_seconds) + " s budget";
    }
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
