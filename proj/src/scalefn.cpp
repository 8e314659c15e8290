#include "aniso/scalefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

constexpr double kPowerRMin = 1e-15;
constexpr double kPowerRMax = 1e15;
constexpr int kBisectionCap = 200;
constexpr double kInverseRelTol = 1e-12;
// Below this fraction of the integration scale the integrands r^(1-alpha) near 0 carry
// no representable mass, while phi(r) may underflow.
constexpr double kNegligibleRadius = 1e-150;
constexpr double kMaxOscillationChunks = 20000.0;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw ArgumentError("scaling exponent alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
}

void check_range(double r_min, double r_max) {
  if (!(r_min > 0.0 && r_max > r_min)) {
    throw ArgumentError("validity range must satisfy 0 < r_min < r_max");
  }
}

}  // namespace

ScaleFunction ScaleFunction::power(double alpha) { return power(alpha, kPowerRMin, kPowerRMax); }

ScaleFunction ScaleFunction::power(double alpha, double r_min, double r_max) {
  check_alpha(alpha);
  check_range(r_min, r_max);
  ScaleFunction f;
  f.kind_ = ScaleKind::power;
  f.alpha_ = alpha;
  f.r_min_ = r_min;
  f.r_max_ = r_max;
  return f;
}

ScaleFunction ScaleFunction::power_log(double alpha, double beta, double r_min, double r_max) {
  check_alpha(alpha);
  check_range(r_min, r_max);
  // The running exponent is alpha + beta / (1 + log(1/r)) for r < 1, which sweeps the
  // interval between alpha and alpha + beta; it has to stay inside (0, 2).
  if (!(beta > -alpha)) {
    throw ValidationError("power_log: beta <= -alpha makes phi non-increasing near r = 1");
  }
  if (!(alpha + std::max(beta, 0.0) < 2.0)) {
    throw ValidationError("power_log: alpha + beta >= 2 violates weak scaling below 2");
  }
  ScaleFunction f;
  f.kind_ = ScaleKind::power_log;
  f.alpha_ = alpha;
  f.beta_ = beta;
  f.r_min_ = r_min;
  f.r_max_ = r_max;
  return f;
}

ScaleFunction ScaleFunction::tabulated(std::vector<double> r, std::vector<double> phi) {
  if (r.size() != phi.size() || r.size() < 2) {
    throw ValidationError("tabulated phi needs at least two (r, phi) pairs of equal length");
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] > 0.0) || !(phi[k] > 0.0)) {
      throw ValidationError("tabulated phi: radii and values must be positive");
    }
    if (k > 0 && !(r[k] > r[k - 1])) {
      throw ValidationError("tabulated phi: radii must be strictly increasing");
    }
    if (k > 0 && !(phi[k] > phi[k - 1])) {
      throw ValidationError("tabulated phi is not strictly increasing at r = " +
                            std::to_string(r[k]));
    }
  }
  ScaleFunction f;
  f.kind_ = ScaleKind::tabulated;
  const std::size_t n = r.size();
  f.slope_low_ = std::log(phi[1] / phi[0]) / std::log(r[1] / r[0]);
  f.slope_high_ = std::log(phi[n - 1] / phi[n - 2]) / std::log(r[n - 1] / r[n - 2]);
  if (!(f.slope_low_ > 0.0 && f.slope_low_ < 2.0 && f.slope_high_ > 0.0 && f.slope_high_ < 2.0)) {
    throw ValidationError("tabulated phi: end-segment exponents must lie in (0, 2)");
  }
  f.r_min_ = r.front();
  f.r_max_ = r.back();
  f.alpha_ = f.slope_low_;
  f.table_r_ = std::move(r);
  f.table_phi_ = std::move(phi);
  return f;
}

double ScaleFunction::eval_tabulated(double r) const {
  const auto& rs = table_r_;
  const auto& ps = table_phi_;
  if (r <= rs.front()) return ps.front() * std::pow(r / rs.front(), slope_low_);
  if (r >= rs.back()) return ps.back() * std::pow(r / rs.back(), slope_high_);
  const auto it = std::upper_bound(rs.begin(), rs.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - rs.begin());
  const double w = std::log(r / rs[k - 1]) / std::log(rs[k] / rs[k - 1]);
  return ps[k - 1] * std::pow(ps[k] / ps[k - 1], w);
}

double ScaleFunction::eval(double r) const {
  switch (kind_) {
    case ScaleKind::power:
      return std::pow(r, alpha_);
    case ScaleKind::power_log: {
      const double base = std::pow(r, alpha_);
      if (r >= 1.0) return base;
      return base * std::pow(1.0 - std::log(r), -beta_);
    }
    case ScaleKind::tabulated:
      return eval_tabulated(r);
  }
  return 0.0;
}

double ScaleFunction::operator()(double r) const {
  if (!(r >= r_min_ && r <= r_max_)) {
    throw RangeError("phi evaluated at r = " + std::to_string(r) + " outside validity range [" +
                     std::to_string(r_min_) + ", " + std::to_string(r_max_) + "]");
  }
  return eval(r);
}

double ScaleFunction::local_exponent(double r) const {
  switch (kind_) {
    case ScaleKind::power:
      return alpha_;
    case ScaleKind::power_log:
      return r >= 1.0 ? alpha_ : alpha_ + beta_ / (1.0 - std::log(r));
    case ScaleKind::tabulated: {
      const auto& rs = table_r_;
      if (r <= rs.front()) return slope_low_;
      if (r >= rs.back()) return slope_high_;
      const auto it = std::upper_bound(rs.begin(), rs.end(), r);
      const std::size_t k = static_cast<std::size_t>(it - rs.begin());
      return std::log(table_phi_[k] / table_phi_[k - 1]) / std::log(rs[k] / rs[k - 1]);
    }
  }
  return alpha_;
}

double ScaleFunction::inverse_extended(double t) const {
  if (!(t > 0.0)) {
    if (t == 0.0) return 0.0;
    throw DomainError("phi inverse of a negative value");
  }
  if (kind_ == ScaleKind::power) return std::pow(t, 1.0 / alpha_);

  double lo = 1.0;
  double hi = 1.0;
  while (eval(lo) > t) {
    lo *= 0.5;
    if (lo < 1e-300) throw NumericalError("phi inverse: no lower bracket for t");
  }
  while (eval(hi) < t) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("phi inverse: no upper bracket for t");
  }
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  for (int it = 0; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double v = eval(std::exp(mid));
    if (std::abs(v - t) <= kInverseRelTol * t) return std::exp(mid);
    if (v < t) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
    if (log_hi - log_lo < 1e-15) break;
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

double ScaleFunction::inverse(double t) const {
  const double lo = eval(r_min_);
  const double hi = eval(r_max_);
  if (!(t >= lo && t <= hi)) {
    throw RangeError("phi inverse: t = " + std::to_string(t) + " outside the range of phi [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp(inverse_extended(t), r_min_, r_max_);
}

double ScaleFunction::nu1(double r) const {
  if (!(r > 0.0)) throw DomainError("nu1 requires r > 0");
  return 1.0 / (r * eval(r));
}

double ScaleFunction::renewal_v(double r) const {
  if (r < 0.0) throw DomainError("renewal function requires r >= 0");
  if (r == 0.0) return 0.0;
  return std::sqrt(eval(r));
}

double ScaleFunction::tail_mass(double a) const {
  if (!(a > 0.0)) throw DomainError("tail mass requires a > 0");
  if (kind_ == ScaleKind::power) return std::pow(a, -alpha_) / alpha_;
  if (kind_ == ScaleKind::power_log && a >= 1.0) return std::pow(a, -alpha_) / alpha_;
  // r = a e^u turns the integrand into 1 / phi(a e^u).
  return quad::log_tail([this](double r) { return 1.0 / (r * eval(r)); }, a).value;
}

double ScaleFunction::small_jump_moment(double eps) const {
  if (!(eps > 0.0)) {
    if (eps == 0.0) return 0.0;
    throw DomainError("small-jump moment requires eps >= 0");
  }
  if (kind_ == ScaleKind::power) return std::pow(eps, 2.0 - alpha_) / (2.0 - alpha_);
  const double floor = kNegligibleRadius * eps;
  return quad::finite([&](double r) { return r > floor ? r / eval(r) : 0.0; }, 0.0, eps).value;
}

double stable_constant(double alpha) {
  check_alpha(alpha);
  return std::numbers::pi / (std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0));
}

double ScaleFunction::char_exponent(double xi) const {
  if (!std::isfinite(xi)) throw DomainError("characteristic exponent needs a finite frequency");
  const double w = std::abs(xi);
  if (w == 0.0) return 0.0;
  const double a = 1.0 / w;
  try {
    auto inner_f = [&](double r) {
      if (r <= kNegligibleRadius * a) return 0.0;
      // 2 sin^2(w r / 2) / (r phi(r)) written to stay finite as r -> 0.
      const double s = std::sin(0.5 * w * r) / r;
      return 2.0 * s * s * (r / eval(r));
    };
    const quad::Result inner = quad::finite(inner_f, 0.0, a);
    return 2.0 * (inner.value + tail_mass(a) - cos_tail(w, a));
  } catch (const NumericalError& e) {
    throw NumericalError("characteristic exponent at xi = " + std::to_string(xi) + ": " +
                         e.what());
  }
}

double ScaleFunction::cos_tail(double w, double a) const {
  // phi is piecewise smooth below `smooth_from`; the double-exponential Fourier rule
  // needs a smooth integrand, so kinks are integrated period by period first.
  double smooth_from = a;
  std::vector<double> kinks;
  if (kind_ == ScaleKind::power_log) {
    kinks.push_back(1.0);
  } else if (kind_ == ScaleKind::tabulated) {
    kinks = table_r_;
  }
  double sum = 0.0;
  if (!kinks.empty() && kinks.back() > a) {
    smooth_from = kinks.back();
    const double period = 2.0 * std::numbers::pi / w;
    const double chunk = std::max(period, (smooth_from - a) / kMaxOscillationChunks);
    auto g = [&](double r) { return std::cos(w * r) * nu1(r); };
    double lo = a;
    auto next_kink = std::upper_bound(kinks.begin(), kinks.end(), a);
    while (lo < smooth_from) {
      double hi = std::min(lo + chunk, smooth_from);
      if (next_kink != kinks.end() && *next_kink < hi) hi = *next_kink++;
      // Whole periods nearly cancel, so a relative tolerance would never be met.
      sum += quad::gauss_fixed(g, lo, hi).value;
      lo = hi;
    }
  }
  auto shifted = [&](double s) { return nu1(smooth_from + s); };
  const quad::Result c = quad::fourier_cos(shifted, w);
  const quad::Result s = quad::fourier_sin(shifted, w);
  const double phase = w * smooth_from;
  return sum + std::cos(phase) * c.value - std::sin(phase) * s.value;
}

double ScaleFunction::char_exponent_fast(double xi) const {
  if (kind_ == ScaleKind::power) return stable_constant(alpha_) * std::pow(std::abs(xi), alpha_);
  return char_exponent(xi);
}

double ScaleFunction::pruitt_h(double r) const {
  if (!(r > 0.0)) throw DomainError("Pruitt function requires r > 0");
  try {
    const double inv_r2 = 1.0 / (r * r);
    auto inner_f = [&](double z) { return z > kNegligibleRadius * r ? z * inv_r2 / eval(z) : 0.0; };
    const quad::Result inner = quad::finite(inner_f, 0.0, r);
    return 2.0 * (inner.value + tail_mass(r));
  } catch (const NumericalError& e) {
    throw NumericalError("Pruitt function at r = " + std::to_string(r) + ": " + e.what());
  }
}

WeakScalingCert validate_ws(const ScaleFunction& f, std::span<const double> grid) {
  if (grid.size() < 2) throw ArgumentError("weak-scaling grid needs at least two radii");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("weak-scaling grid must be strictly sorted");
  }
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = f(grid[k]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(values[k] > values[k - 1])) {
      throw ValidationError("phi is not strictly increasing between r = " +
                            std::to_string(grid[k - 1]) + " and r = " + std::to_string(grid[k]));
    }
  }

  WeakScalingCert cert;
  cert.grid.assign(grid.begin(), grid.end());
  cert.alpha_low = std::numeric_limits<double>::infinity();
  cert.alpha_high = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double slope = std::log(values[j] / values[i]) / std::log(grid[j] / grid[i]);
      cert.alpha_low = std::min(cert.alpha_low, slope);
      cert.alpha_high = std::max(cert.alpha_high, slope);
    }
  }
  if (!(cert.alpha_high < 2.0)) {
    throw ValidationError("no upper scaling exponent below 2 fits the grid (max log-slope " +
                          std::to_string(cert.alpha_high) + ")");
  }
  if (!(cert.alpha_low > 0.0)) throw ValidationError("lower scaling exponent is not positive");

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double ratio = values[j] / values[i];
      const double scale = grid[j] / grid[i];
      lo = std::min(lo, ratio / std::pow(scale, cert.alpha_low));
      hi = std::max(hi, ratio / std::pow(scale, cert.alpha_high));
    }
  }
  cert.c_low = std::min(1.0, lo);
  cert.c_high = std::max(1.0, hi);
  return cert;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw ArgumentError("geometric grid needs 0 < lo < hi, n >= 2");
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) g[k] = lo * std::exp(step * static_cast<double>(k));
  g.back() = hi;
  return g;
}

}  // namespace aniso
