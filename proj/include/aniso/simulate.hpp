#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp uses unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

#include "aniso/errors.hpp"
#include "aniso/geometry.hpp"
#include "aniso/scalefn.hpp"

namespace aniso {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
// Independent generator for one path: (seed, stream, path) mixed through splitmix64.
Rng path_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t path);

// Uniform on (0, 1), never 0 or 1.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}
inline double standard_exponential(Rng& rng) { return -std::log(uniform_open(rng)); }
double standard_normal(Rng& rng);

// Symmetric alpha-stable increment with exponent c_alpha |xi|^alpha per unit time
// (Chambers-Mallows-Stuck).
double sample_stable_increment(double alpha, double dt, Rng& rng);

// One-coordinate jump law split at a cutoff eps: jumps above eps by tail inversion of
// N(r) = \int_r^inf nu1, jumps below eps replaced by a Gaussian with variance
// 2 \int_0^eps r^2 nu1 per unit time. Cutoffs in [eps_min, eps_max] are supported.
class JumpLaw {
 public:
  static constexpr std::size_t kTableNodes = 4096;

  JumpLaw(const ScaleFunction& f, double eps_min, double eps_max);

  double eps_min() const { return eps_min_; }
  double eps_max() const { return eps_max_; }
  const ScaleFunction& phi() const { return f_; }

  // One-sided tail mass N(eps); the two-sided jump rate is 2 N(eps).
  double tail_mass(double eps) const;
  // Two-sided small-jump variance rate 2 \int_0^eps r^2 nu1.
  double small_variance(double eps) const;
  // |jump| conditioned on |jump| > eps.
  double sample_magnitude(double eps, Rng& rng) const;
  // Throws RangeError for a cutoff outside [eps_min, eps_max].
  void check_eps(double eps) const;

 private:
  using Interp = boost::math::interpolators::pchip<std::vector<double>>;

  ScaleFunction f_;
  double eps_min_;
  double eps_max_;
  bool power_ = false;
  double alpha_ = 1.0;
  // log r -> log N, log r -> log M, -log N -> log r on the table.
  std::shared_ptr<const Interp> log_n_;
  std::shared_ptr<const Interp> log_m_;
  std::shared_ptr<const Interp> inv_;
  double log_r_hi_ = 0.0;
  double log_n_hi_ = 0.0;
  double end_slope_ = 0.0;  // d log N / d log r at the table end
};

// Compound-Poisson jumps above eps plus the Gaussian small-jump substitute over dt.
double sample_general_increment(const JumpLaw& law, double dt, double eps, Rng& rng);
double sample_general_increment(const ScaleFunction& f, double dt, double eps, Rng& rng);

enum class KappaKind { constant_one, constant, cosine, callable };

// Bounded symmetric jump-intensity modulation kappa(x, y) in [1/kappa0, kappa0].
struct KappaSpec {
  KappaKind kind = KappaKind::constant_one;
  double value = 1.0;      // constant
  double amplitude = 0.0;  // cosine: 1 + amplitude cos(frequency sum_i (x_i + y_i))
  double frequency = 1.0;
  double kappa0 = 1.0;
  // Hoelder data; carried as metadata only.
  double kappa1 = 0.0;
  double eta = 1.0;
  std::function<double(std::span<const double>, std::span<const double>)> fn;

  static KappaSpec one() { return {}; }
  static KappaSpec constant_value(double c, double kappa0);
  static KappaSpec cosine(double amplitude, double frequency);
  static KappaSpec callable(std::function<double(std::span<const double>, std::span<const double>)> f,
                            double kappa0, double kappa1 = 0.0, double eta = 1.0);

  bool is_one() const { return kind == KappaKind::constant_one; }
  double operator()(std::span<const double> x, std::span<const double> y) const;
  std::string name() const;
};

struct SimConfig {
  double eps_small_jump = 1e-3;  // smallest cutoff
  double eps_max = 0.05;         // largest cutoff
  // Cutoff used at x: clamp(eps_depth_ratio * depth(x), eps_small_jump, eps_max); 0 keeps
  // the cutoff fixed at eps_small_jump.
  double eps_depth_ratio = 0.1;
  double dt_check = 0.01;  // upper bound on a Gaussian sub-step
  // Gaussian sub-steps satisfy sigma^2 dt <= max(gauss_depth_fraction * depth, eps)^2.
  double gauss_depth_fraction = 0.1;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  bool record_occupation = false;
  std::uint64_t max_steps = 500'000'000;

  void validate() const;
};

struct OccupationSample {
  double weight;
  Point position;
};

struct KilledPathResult {
  bool exited = false;
  double exit_time = std::numeric_limits<double>::infinity();
  bool exit_by_jump = false;
  Point exit_position;       // valid iff exited
  Point pre_exit_position;   // valid iff exited
  Point position;            // at the horizon, valid iff !exited
  std::uint64_t jumps = 0;
  std::uint64_t steps = 0;
  std::vector<OccupationSample> occupation;  // only with record_occupation

  bool alive() const { return !exited; }
};

// Observer receives the piecewise-constant path as (state, holding time) pairs.
struct NoObserver {
  void hold(std::span<const double>, double) const {}
};

template <class R>
concept Region = requires(const R& r, std::span<const double> x) {
  { r.dim() } -> std::convertible_to<std::size_t>;
  { r.depth(x) } -> std::convertible_to<double>;
};

namespace detail {

template <class Obs>
void observe(Obs& obs, KilledPathResult& res, bool record, std::span<const double> x, double dt) {
  if (dt <= 0.0) return;
  obs.hold(x, dt);
  if (record) res.occupation.push_back({dt, Point(x.begin(), x.end())});
}

}  // namespace detail

// Path of the coordinate-wise jump process started at x0 and killed on leaving the
// region. Each event picks an axis uniformly; with a non-trivial kappa, jumps proposed
// at kappa0 times the base rate are accepted with probability kappa(x, x + h e_i) / kappa0.
template <Region R, class Obs = NoObserver>
KilledPathResult simulate_killed_path(const R& region, const KappaSpec& kappa, const JumpLaw& law,
                                      std::span<const double> x0, const SimConfig& cfg, Rng& rng,
                                      Obs&& obs = Obs{}) {
  const std::size_t d = region.dim();
  if (x0.size() != d) throw ArgumentError("start point dimension differs from the region");
  KilledPathResult res;
  Point x(x0.begin(), x0.end());
  double depth = region.depth(x);
  if (!(depth > 0.0)) {
    res.exited = true;
    res.exit_time = 0.0;
    res.exit_position = x;
    res.pre_exit_position = x;
    return res;
  }
  const double kappa0 = kappa.is_one() ? 1.0 : kappa.kappa0;
  const double dd = static_cast<double>(d);
  Point proposal(d);
  Point before(d);
  double s = 0.0;

  auto exit_now = [&](bool by_jump) {
    res.exited = true;
    res.exit_time = s;
    res.exit_by_jump = by_jump;
    res.exit_position = x;
    res.pre_exit_position = before;
  };

  while (s < cfg.horizon) {
    if (++res.steps > cfg.max_steps) throw NumericalError("path exceeded the step limit");
    const double eps = cfg.eps_depth_ratio > 0.0
                           ? std::clamp(cfg.eps_depth_ratio * depth, law.eps_min(), law.eps_max())
                           : law.eps_min();
    const double rate = 2.0 * law.tail_mass(eps) * dd * kappa0;
    double var = law.small_variance(eps);
    if (!kappa.is_one()) var *= kappa(x, x);
    double dt_sub = cfg.horizon - s;
    dt_sub = std::min(dt_sub, cfg.dt_check);
    if (var > 0.0 && std::isfinite(depth)) {
      // Below the cutoff scale the Gaussian part stands in for jumps of size ~eps anyway.
      const double allowed = std::max(cfg.gauss_depth_fraction * depth, eps);
      dt_sub = std::min(dt_sub, allowed * allowed / var);
    }
    const double wait = standard_exponential(rng) / rate;
    const bool event = wait < dt_sub;
    const double step = event ? wait : dt_sub;

    detail::observe(obs, res, cfg.record_occupation, x, step);
    s += step;
    if (var > 0.0) {
      before = x;
      const double sd = std::sqrt(var * step);
      for (std::size_t i = 0; i < d; ++i) x[i] += sd * standard_normal(rng);
      depth = region.depth(x);
      if (!(depth > 0.0)) {
        exit_now(false);
        return res;
      }
    }
    if (!event) continue;

    const std::size_t axis = std::min<std::size_t>(d - 1, static_cast<std::size_t>(uniform_open(rng) * dd));
    double h = law.sample_magnitude(eps, rng);
    if (rng() & 1u) h = -h;
    if (!kappa.is_one()) {
      proposal = x;
      proposal[axis] += h;
      if (uniform_open(rng) * kappa0 >= kappa(x, proposal)) continue;
    }
    ++res.jumps;
    before = x;
    x[axis] += h;
    depth = region.depth(x);
    if (!(depth > 0.0)) {
      exit_now(true);
      return res;
    }
  }
  res.position = x;
  return res;
}

// Path from (cfg.seed, cfg.stream, path index).
template <Region R, class Obs = NoObserver>
KilledPathResult simulate_killed_path(const R& region, const KappaSpec& kappa, const JumpLaw& law,
                                      std::span<const double> x0, const SimConfig& cfg,
                                      std::uint64_t path, Obs&& obs = Obs{}) {
  Rng rng = path_rng(cfg.seed, cfg.stream, path);
  return simulate_killed_path(region, kappa, law, x0, cfg, rng, std::forward<Obs>(obs));
}

struct FrequencyRow {
  double frequency = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
};

using RegionPredicate = std::function<bool(std::span<const double>)>;

// Landing frequencies of exit positions among exited paths, with binomial errors.
std::vector<FrequencyRow> exit_decomposition(std::span<const KilledPathResult> results,
                                             std::span<const RegionPredicate> regions);

// Parallel execution over paths in fixed blocks of kBlock paths. fn(path, rng, acc) fills
// a per-block accumulator; blocks are merged in block order, so the result does not depend
// on the thread count. Acc needs default construction and merge(const Acc&).
struct Parallel {
  unsigned threads = 1;
  static unsigned resolve(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

inline constexpr std::size_t kBlock = 1024;

template <class Acc, class Fn>
Acc run_paths(std::size_t n, std::uint64_t seed, std::uint64_t stream, const Parallel& par, Fn&& fn) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<Acc> partial(blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t end = std::min(n, (b + 1) * kBlock);
      for (std::size_t p = b * kBlock; p < end; ++p) {
        Rng rng = path_rng(seed, stream, p);
        fn(static_cast<std::uint64_t>(p), rng, partial[b]);
      }
    }
  };
  const unsigned threads = std::min<unsigned>(Parallel::resolve(par.threads),
                                              static_cast<unsigned>(std::max<std::size_t>(blocks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (unsigned k = 0; k < threads; ++k) {
      pool.emplace_back([&]() {
        try {
          worker();
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          next = blocks;
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }
  Acc total;
  for (const Acc& a : partial) total.merge(a);
  return total;
}

}  // namespace aniso
