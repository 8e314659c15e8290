#include "aniso/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

constexpr double kTruncation = 40.0;   // t psi(Xi)
constexpr int kGradedPanels = 60;      // geometric panels towards xi = 0
constexpr double kPanelPhase = 8.0;    // max panel width times |z|
constexpr std::size_t kPsiTable = 400;
constexpr double kPsiTableDecades = 12.0;

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

}  // namespace

TransitionDensity1D::TransitionDensity1D(const ScaleFunction& f, double t, std::size_t nodes)
    : f_(f), t_(t) {
  if (!(t > 0.0)) throw DomainError("transition density needs t > 0");
  if (nodes < 64) throw ArgumentError("transition density needs at least 64 nodes");

  if (f.kind() == ScaleKind::power) {
    cutoff_ = std::pow(kTruncation / (t * stable_constant(f.alpha())), 1.0 / f.alpha());
  } else {
    double xi = 1.0;
    while (t * f.char_exponent(xi) < kTruncation) {
      xi *= 2.0;
      if (xi > 1e12) throw NumericalError("frequency cutoff exceeds 1e12; t too small for this phi");
    }
    while (xi > 1e-12 && t * f.char_exponent(0.5 * xi) >= kTruncation) xi *= 0.5;
    cutoff_ = xi;
    const double lo = std::log(cutoff_) - kPsiTableDecades * std::numbers::ln10;
    const double hi = std::log(2.0 * cutoff_);
    log_xi_.resize(kPsiTable);
    log_psi_.resize(kPsiTable);
    for (std::size_t k = 0; k < kPsiTable; ++k) {
      log_xi_[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kPsiTable - 1);
      log_psi_[k] = std::log(f.char_exponent(std::exp(log_xi_[k])));
    }
    interp_ = std::make_shared<const PsiInterp>(std::vector<double>(log_xi_),
                                                std::vector<double>(log_psi_));
  }

  const std::size_t panels = nodes / 16;
  rule_ = build_rule(panels);
  z_max_ = kPanelPhase * static_cast<double>(panels) / cutoff_;

  // Doubling self-check against the rule with half the panels.
  const Rule coarse = build_rule(panels / 2);
  const double scale = apply_cos(rule_, 0.0);
  for (double z : {0.0, 0.25 * z_max_}) {
    const double diff = std::abs(apply_cos(rule_, z) - apply_cos(coarse, z));
    if (diff > 1e-7 * scale) {
      throw NumericalError("Fourier inversion not resolved at z = " + std::to_string(z) +
                           "; increase the node count");
    }
  }
}

double TransitionDensity1D::psi(double xi) const {
  if (xi == 0.0) return 0.0;
  if (f_.kind() == ScaleKind::power) return f_.char_exponent_fast(xi);
  const double lx = std::log(xi);
  if (lx <= log_xi_.front()) {
    const double slope = (log_psi_[1] - log_psi_[0]) / (log_xi_[1] - log_xi_[0]);
    return std::exp(log_psi_.front() + slope * (lx - log_xi_.front()));
  }
  if (lx >= log_xi_.back()) return f_.char_exponent(xi);
  return std::exp((*interp_)(lx));
}

double TransitionDensity1D::transform(double xi) const { return std::exp(-t_ * psi(std::abs(xi))); }

TransitionDensity1D::Rule TransitionDensity1D::build_rule(std::size_t panels) const {
  const double width = cutoff_ / static_cast<double>(panels);
  std::vector<double> edges;
  edges.reserve(panels + kGradedPanels + 2);
  edges.push_back(0.0);
  for (int j = kGradedPanels; j >= 1; --j) edges.push_back(std::ldexp(width, -j));
  for (std::size_t k = 1; k <= panels; ++k) edges.push_back(width * static_cast<double>(k));

  const auto& absc = Gauss16::abscissa();
  const auto& wts = Gauss16::weights();
  Rule r;
  r.xi.reserve(16 * edges.size());
  r.weight.reserve(16 * edges.size());
  auto push = [&](double xi, double w) {
    const double v = w * transform(xi);
    if (v == 0.0) return;
    r.xi.push_back(xi);
    r.weight.push_back(v);
  };
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double mid = 0.5 * (edges[e] + edges[e + 1]);
    const double half = 0.5 * (edges[e + 1] - edges[e]);
    for (std::size_t k = 0; k < absc.size(); ++k) {
      if (absc[k] == 0.0) {
        push(mid, half * wts[k]);
      } else {
        push(mid - half * absc[k], half * wts[k]);
        push(mid + half * absc[k], half * wts[k]);
      }
    }
  }
  return r;
}

double TransitionDensity1D::apply_cos(const Rule& r, double z) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.xi.size(); ++k) s += r.weight[k] * std::cos(r.xi[k] * z);
  return s;
}

double TransitionDensity1D::density(double z) const {
  const double az = std::abs(z);
  if (az <= z_max_) return apply_cos(rule_, az) / std::numbers::pi;
  auto g = [this](double xi) { return transform(xi); };
  return quad::fourier_cos(g, az).value / std::numbers::pi;
}

double TransitionDensity1D::cdf(double z) const {
  if (z == 0.0) return 0.5;
  const double az = std::abs(z);
  const double sign = z > 0.0 ? 1.0 : -1.0;
  double half_mass;
  if (az <= z_max_) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule_.xi.size(); ++k) {
      s += rule_.weight[k] * std::sin(rule_.xi[k] * az) / rule_.xi[k];
    }
    half_mass = s / std::numbers::pi;
  } else {
    // \int sin(xi z)/xi = pi/2 carries the unit mass; the remainder decays.
    auto g = [this](double xi) { return std::expm1(-t_ * psi(xi)) / xi; };
    half_mass = 0.5 + quad::fourier_sin(g, az).value / std::numbers::pi;
  }
  return std::clamp(0.5 + sign * half_mass, 0.0, 1.0);
}

double TransitionDensity1D::box_average(double lo, double hi) const {
  if (!(hi > lo)) throw ArgumentError("box_average needs lo < hi");
  // Symmetry keeps the subtraction on the side with the smaller tail.
  if (lo >= 0.0) return ((1.0 - cdf(lo)) - (1.0 - cdf(hi))) / (hi - lo);
  if (hi <= 0.0) return box_average(-hi, -lo);
  return (cdf(hi) - cdf(lo)) / (hi - lo);
}

double density_1d(const ScaleFunction& f, double t, double z) {
  return TransitionDensity1D(f, t).density(z);
}

double product_density(const TransitionDensity1D& p, std::span<const double> x,
                       std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("product_density: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) v *= p.density(x[i] - y[i]);
  return v;
}

double product_density(const ScaleFunction& f, double t, std::span<const double> x,
                       std::span<const double> y) {
  return product_density(TransitionDensity1D(f, t), x, y);
}

double product_box_average(const TransitionDensity1D& p, std::span<const double> x,
                           std::span<const double> y, std::span<const double> h) {
  if (x.size() != y.size() || h.size() != x.size()) {
    throw ArgumentError("product_box_average: dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(h[i] > 0.0)) throw ArgumentError("box half-widths must be positive");
    const double c = y[i] - x[i];
    v *= p.box_average(c - h[i], c + h[i]);
  }
  return v;
}

PVResult generator_pv(const ScaleFunction& f, const PointFunction& w, std::span<const double> x,
                      std::size_t axis) {
  if (x.empty() || axis >= x.size()) throw ArgumentError("generator_pv: axis out of range");
  const double scale = x.back();
  if (!(scale > 0.0)) throw ArgumentError("generator_pv needs a positive last coordinate");

  std::vector<double> p(x.begin(), x.end());
  const double centre = x[axis];
  const double w0 = w(x);
  auto along = [&](double s) {
    p[axis] = s;
    return w(p);
  };
  auto integrand = [&](double tau) {
    // nu1 underflows before w overflows; skip w there to avoid inf * 0.
    const double n = f.nu1(tau);
    if (n == 0.0) return 0.0;
    const double g = along(centre + tau) + along(centre - tau) - 2.0 * w0;
    return g == 0.0 ? 0.0 : g * n;
  };

  constexpr int kLevels = 10;
  constexpr int kOrders = 3;
  const double h0 = 0.25 * scale;

  double err = 0.0;
  auto add = [&err](quad::Result r) {
    err += r.error;
    return r.value;
  };
  double outer = add(quad::smooth(integrand, h0, 0.5 * scale, 1e-13));
  outer += add(quad::finite(integrand, 0.5 * scale, scale, 1e-13));
  outer += add(quad::finite(integrand, scale, 2.0 * scale, 1e-13));
  outer += add(quad::log_tail(integrand, 2.0 * scale, 1e-13));

  std::vector<std::vector<double>> table(kLevels + 1, std::vector<double>(kOrders + 1, 0.0));
  table[0][0] = outer;
  double h = h0;
  for (int k = 1; k <= kLevels; ++k) {
    table[k][0] = table[k - 1][0] + add(quad::gauss_fixed(integrand, 0.5 * h, h));
    h *= 0.5;
  }
  const double a = f.local_exponent(std::clamp(h, f.r_min(), f.r_max()));
  for (int m = 1; m <= kOrders; ++m) {
    const double factor = std::exp2(2.0 * m - a) - 1.0;
    for (int k = m; k <= kLevels; ++k) {
      table[k][m] = table[k][m - 1] + (table[k][m - 1] - table[k - 1][m - 1]) / factor;
    }
  }
  PVResult out;
  out.value = table[kLevels][kOrders];
  out.error = std::abs(table[kLevels][kOrders] - table[kLevels - 1][kOrders]) + err;
  if (!std::isfinite(out.value)) throw NumericalError("generator_pv: non-finite principal value");
  return out;
}

}  // namespace aniso
