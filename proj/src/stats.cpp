#include "aniso/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aniso/errors.hpp"

namespace aniso {

double MeanAccumulator::mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

double MeanAccumulator::variance() const {
  if (n < 2) return 0.0;
  const double m = mean();
  const double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  return std::max(v, 0.0);
}

double MeanAccumulator::std_error() const {
  return n == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
}

double MCEstimate::relative_error() const {
  if (value == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(std_error / value);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || (!w.empty() && w.size() != x.size())) {
    throw ArgumentError("fit_line: series lengths differ");
  }
  if (x.size() < 2) throw ArgumentError("fit_line needs at least two points");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double wk = w.empty() ? 1.0 : w[k];
    sw += wk;
    sx += wk * x[k];
    sy += wk * y[k];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double wk = w.empty() ? 1.0 : w[k];
    sxx += wk * (x[k] - mx) * (x[k] - mx);
    sxy += wk * (x[k] - mx) * (y[k] - my);
    syy += wk * (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double wk = w.empty() ? 1.0 : w[k];
    const double res = y[k] - fit.intercept - fit.slope * x[k];
    sse += wk * res * res;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double dof = static_cast<double>(x.size()) - 2.0;
  fit.slope_se = dof > 0.0 ? std::sqrt(sse / dof / sxx) : 0.0;
  return fit;
}

PooledFit fit_common_slope(std::span<const Series> groups) {
  if (groups.empty()) throw ArgumentError("fit_common_slope needs at least one series");
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t points = 0;
  std::vector<double> mx(groups.size()), my(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Series& s = groups[g];
    if (s.x.size() != s.y.size() || (!s.w.empty() && s.w.size() != s.x.size())) {
      throw ArgumentError("fit_common_slope: series lengths differ");
    }
    if (s.x.empty()) throw ArgumentError("fit_common_slope: empty series");
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double wk = s.w.empty() ? 1.0 : s.w[k];
      sw += wk;
      sx += wk * s.x[k];
      sy += wk * s.y[k];
    }
    mx[g] = sx / sw;
    my[g] = sy / sw;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double wk = s.w.empty() ? 1.0 : s.w[k];
      sxx += wk * (s.x[k] - mx[g]) * (s.x[k] - mx[g]);
      sxy += wk * (s.x[k] - mx[g]) * (s.y[k] - my[g]);
      syy += wk * (s.y[k] - my[g]) * (s.y[k] - my[g]);
    }
    points += s.x.size();
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_common_slope: no spread in x");
  PooledFit fit;
  fit.slope = sxy / sxx;
  fit.intercepts.resize(groups.size());
  double sse = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    fit.intercepts[g] = my[g] - fit.slope * mx[g];
    const Series& s = groups[g];
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double wk = s.w.empty() ? 1.0 : s.w[k];
      const double res = s.y[k] - fit.intercepts[g] - fit.slope * s.x[k];
      sse += wk * res * res;
    }
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double dof = static_cast<double>(points) - static_cast<double>(groups.size()) - 1.0;
  fit.slope_se = dof > 0.0 ? std::sqrt(sse / dof / sxx) : 0.0;
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ArgumentError("median of an empty list");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace aniso
