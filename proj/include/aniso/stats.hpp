#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aniso {

// Count, sum and sum of squares; merging is exact in any fixed order.
struct MeanAccumulator {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double v) {
    ++n;
    sum += v;
    sumsq += v * v;
  }
  void merge(const MeanAccumulator& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const;
  double variance() const;  // unbiased sample variance
  double std_error() const;
};

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t n_effective = 0;
  // Fraction of paths still alive at the simulation horizon (truncation indicator).
  double alive_fraction = 0.0;
  bool truncated = false;

  double relative_error() const;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};

// Weighted least squares y = a + b x. Weights default to 1.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

struct PooledFit {
  double slope = 0.0;
  double slope_se = 0.0;
  std::vector<double> intercepts;
  double r2 = 0.0;  // within-group coefficient of determination
};

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
};

// Weighted least squares with a common slope and one intercept per series.
PooledFit fit_common_slope(std::span<const Series> groups);

double median(std::vector<double> v);

}  // namespace aniso
