#include "aniso/simulate.hpp"

#include <numbers>

#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

constexpr double kTableDecades = 12.0;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng path_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t path) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ path));
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method, one variate per call.
  double u, v, q;
  do {
    u = 2.0 * uniform_open(rng) - 1.0;
    v = 2.0 * uniform_open(rng) - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  return u * std::sqrt(-2.0 * std::log(q) / q);
}

double sample_stable_increment(double alpha, double dt, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable increment needs alpha in (0, 2)");
  if (!(dt >= 0.0)) throw DomainError("stable increment needs dt >= 0");
  if (dt == 0.0) return 0.0;
  const double v = std::numbers::pi * (uniform_open(rng) - 0.5);
  const double scale = std::pow(stable_constant(alpha) * dt, 1.0 / alpha);
  if (alpha == 1.0) return scale * std::tan(v);
  const double w = standard_exponential(rng);
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return scale * x;
}

JumpLaw::JumpLaw(const ScaleFunction& f, double eps_min, double eps_max)
    : f_(f), eps_min_(eps_min), eps_max_(eps_max) {
  if (!(eps_min > 0.0 && eps_max >= eps_min)) {
    throw ArgumentError("jump law needs 0 < eps_min <= eps_max");
  }
  if (f.kind() == ScaleKind::power) {
    power_ = true;
    alpha_ = f.alpha();
    return;
  }
  // Tail-mass table on log-spaced radii from eps_min.
  const double lo = std::log(eps_min);
  const double hi = lo + kTableDecades * std::numbers::ln10;
  std::vector<double> log_r(kTableNodes), log_n(kTableNodes), log_m(kTableNodes);
  for (std::size_t k = 0; k < kTableNodes; ++k) {
    log_r[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kTableNodes - 1);
  }
  // Segment integrals in u = log r; the segments are short, so a fixed rule is exact to
  // roundoff and far cheaper than one adaptive integral per node.
  auto segment = [&f, &log_r](std::size_t k, int power) {
    return quad::gauss_fixed(
               [&f, power](double u) {
                 const double r = std::exp(u);
                 return (power == 0 ? 1.0 : r * r) / f.eval(r);
               },
               log_r[k - 1], log_r[k])
        .value;
  };
  double tail = f.tail_mass(std::exp(log_r.back()));
  for (std::size_t k = kTableNodes; k-- > 0;) {
    if (k + 1 < kTableNodes) tail += segment(k + 1, 0);
    log_n[k] = std::log(tail);
  }
  double moment = f.small_jump_moment(eps_min);
  for (std::size_t k = 0; k < kTableNodes; ++k) {
    if (k > 0) moment += segment(k, 2);
    log_m[k] = std::log(moment);
    if (!std::isfinite(log_n[k]) || !std::isfinite(log_m[k])) {
      throw NumericalError("jump law table is not finite at r = " + std::to_string(std::exp(log_r[k])));
    }
  }
  for (std::size_t k = 1; k < kTableNodes; ++k) {
    if (!(log_n[k] < log_n[k - 1])) throw NumericalError("tail mass table is not decreasing");
  }
  log_r_hi_ = log_r.back();
  log_n_hi_ = log_n.back();
  end_slope_ = (log_n[kTableNodes - 1] - log_n[kTableNodes - 2]) /
               (log_r[kTableNodes - 1] - log_r[kTableNodes - 2]);
  std::vector<double> neg_log_n(kTableNodes);
  for (std::size_t k = 0; k < kTableNodes; ++k) neg_log_n[k] = -log_n[k];
  inv_ = std::make_shared<const Interp>(std::move(neg_log_n), std::vector<double>(log_r));
  log_n_ = std::make_shared<const Interp>(std::vector<double>(log_r), std::move(log_n));
  log_m_ = std::make_shared<const Interp>(std::move(log_r), std::move(log_m));
}

void JumpLaw::check_eps(double eps) const {
  if (!(eps >= eps_min_ * (1.0 - 1e-12) && eps <= eps_max_ * (1.0 + 1e-12))) {
    throw RangeError("cutoff " + std::to_string(eps) + " outside the jump law range");
  }
}

double JumpLaw::tail_mass(double eps) const {
  if (power_) return std::pow(eps, -alpha_) / alpha_;
  return std::exp((*log_n_)(std::log(eps)));
}

double JumpLaw::small_variance(double eps) const {
  if (power_) return 2.0 * std::pow(eps, 2.0 - alpha_) / (2.0 - alpha_);
  return 2.0 * std::exp((*log_m_)(std::log(eps)));
}

double JumpLaw::sample_magnitude(double eps, Rng& rng) const {
  const double u = uniform_open(rng);
  if (power_) return alpha_ == 1.0 ? eps / u : eps * std::pow(u, -1.0 / alpha_);
  // N(r) = u N(eps).
  const double target = std::log(u) + (*log_n_)(std::log(eps));
  if (target >= log_n_hi_) return std::exp((*inv_)(-target));
  return std::exp(log_r_hi_ + (target - log_n_hi_) / end_slope_);
}

double sample_general_increment(const JumpLaw& law, double dt, double eps, Rng& rng) {
  if (!(dt >= 0.0)) throw DomainError("increment needs dt >= 0");
  law.check_eps(eps);
  if (dt == 0.0) return 0.0;
  std::poisson_distribution<std::uint64_t> count(2.0 * law.tail_mass(eps) * dt);
  const std::uint64_t n = count(rng);
  double x = std::sqrt(law.small_variance(eps) * dt) * standard_normal(rng);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double h = law.sample_magnitude(eps, rng);
    x += (rng() & 1u) ? h : -h;
  }
  return x;
}

double sample_general_increment(const ScaleFunction& f, double dt, double eps, Rng& rng) {
  return sample_general_increment(JumpLaw(f, eps, eps), dt, eps, rng);
}

KappaSpec KappaSpec::constant_value(double c, double kappa0) {
  if (!(kappa0 >= 1.0)) throw ArgumentError("kappa0 must be >= 1");
  if (!(c >= 1.0 / kappa0 && c <= kappa0)) throw ArgumentError("constant kappa outside [1/kappa0, kappa0]");
  KappaSpec k;
  k.kind = KappaKind::constant;
  k.value = c;
  k.kappa0 = kappa0;
  return k;
}

KappaSpec KappaSpec::cosine(double amplitude, double frequency) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw ArgumentError("cosine kappa needs amplitude in [0, 1)");
  KappaSpec k;
  k.kind = KappaKind::cosine;
  k.amplitude = amplitude;
  k.frequency = frequency;
  k.kappa0 = std::max(1.0 + amplitude, 1.0 / (1.0 - amplitude));
  k.kappa1 = 2.0 * amplitude * std::abs(frequency);
  return k;
}

KappaSpec KappaSpec::callable(std::function<double(std::span<const double>, std::span<const double>)> f,
                              double kappa0, double kappa1, double eta) {
  if (!f) throw ArgumentError("callable kappa needs a function");
  if (!(kappa0 >= 1.0)) throw ArgumentError("kappa0 must be >= 1");
  KappaSpec k;
  k.kind = KappaKind::callable;
  k.fn = std::move(f);
  k.kappa0 = kappa0;
  k.kappa1 = kappa1;
  k.eta = eta;
  return k;
}

double KappaSpec::operator()(std::span<const double> x, std::span<const double> y) const {
  switch (kind) {
    case KappaKind::constant_one:
      return 1.0;
    case KappaKind::constant:
      return value;
    case KappaKind::cosine: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += x[i] + y[i];
      return 1.0 + amplitude * std::cos(frequency * s);
    }
    case KappaKind::callable: {
      const double v = fn(x, y);
      if (!(v >= 1.0 / kappa0 * (1.0 - 1e-12) && v <= kappa0 * (1.0 + 1e-12))) {
        throw DomainError("kappa value outside [1/kappa0, kappa0]");
      }
      return v;
    }
  }
  return 1.0;
}

std::string KappaSpec::name() const {
  switch (kind) {
    case KappaKind::constant_one:
      return "constant_one";
    case KappaKind::constant:
      return "constant";
    case KappaKind::cosine:
      return "cosine";
    case KappaKind::callable:
      return "callable";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(eps_small_jump > 0.0)) throw ArgumentError("eps_small_jump must be positive");
  if (!(eps_max >= eps_small_jump)) throw ArgumentError("eps_max must be >= eps_small_jump");
  if (!(eps_depth_ratio >= 0.0)) throw ArgumentError("eps_depth_ratio must be >= 0");
  if (!(dt_check > 0.0)) throw ArgumentError("dt_check must be positive");
  if (!(gauss_depth_fraction > 0.0)) throw ArgumentError("gauss_depth_fraction must be positive");
  if (!(horizon >= 0.0)) throw ArgumentError("horizon must be >= 0");
}

std::vector<FrequencyRow> exit_decomposition(std::span<const KilledPathResult> results,
                                             std::span<const RegionPredicate> regions) {
  std::vector<FrequencyRow> rows(regions.size());
  std::size_t exited = 0;
  for (const auto& r : results) {
    if (!r.exited) continue;
    ++exited;
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (regions[k](r.exit_position)) ++rows[k].hits;
    }
  }
  if (exited == 0) return rows;
  const double n = static_cast<double>(exited);
  for (auto& row : rows) {
    row.frequency = static_cast<double>(row.hits) / n;
    row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) / n);
  }
  return rows;
}

}  // namespace aniso
