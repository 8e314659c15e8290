#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aniso/bounds.hpp"
#include "aniso/geometry.hpp"
#include "aniso/simulate.hpp"
#include "aniso/stats.hpp"

namespace aniso {

// Everything a Monte Carlo estimator needs besides the domain and the points.
// Estimators draw path p from (cfg.seed, cfg.stream, p); use distinct streams for
// independent estimates.
struct Simulator {
  Simulator(ScaleFunction f, KappaSpec kappa, SimConfig cfg, Parallel par = {});

  Simulator with_stream(std::uint64_t stream) const;
  Simulator with_horizon(double horizon) const;

  ScaleFunction phi;
  KappaSpec kappa;
  SimConfig cfg;
  Parallel par;
  std::shared_ptr<const JumpLaw> law;
};

// P_x(tau_D > t).
MCEstimate mc_survival(const Simulator& sim, const Domain& d, std::span<const double> x, double t,
                       std::size_t n);
// P_x(tau_D > t_k) for every t_k from one set of paths.
std::vector<MCEstimate> mc_survival_curve(const Simulator& sim, const Domain& d,
                                          std::span<const double> x, std::span<const double> t_grid,
                                          std::size_t n);

// P_x(X_t in y + [-h, h], tau_D > t) / volume.
MCEstimate mc_heat_kernel(const Simulator& sim, const Domain& d, double t,
                          std::span<const double> x, std::span<const double> y,
                          std::span<const double> h, std::size_t n);
// Same without killing. With kappa = 1 every coordinate is sampled directly at time t
// (exactly for power phi).
MCEstimate mc_heat_kernel_free(const Simulator& sim, double t, std::span<const double> x,
                               std::span<const double> y, std::span<const double> h,
                               std::size_t n);

// Mean occupation time of y + [-h, h] before tau_D, divided by the volume; paths are cut
// at sim.cfg.horizon.
MCEstimate mc_green(const Simulator& sim, const Domain& d, std::span<const double> x,
                    std::span<const double> y, std::span<const double> h, std::size_t n);

// E_x tau_D, paths cut at sim.cfg.horizon.
MCEstimate mc_exit_time(const Simulator& sim, const Domain& d, std::span<const double> x,
                        std::size_t n);
template <Region R>
MCEstimate mc_exit_time_region(const Simulator& sim, const R& region, std::span<const double> x,
                               std::size_t n);

struct EigenFit {
  double lambda = 0.0;
  double lambda_se = 0.0;
  double r2 = 0.0;
  std::vector<double> lambda_per_x;  // separate fit per start point
  std::vector<double> profile;       // g(x) = S(x, t_ref) e^{lambda t_ref}
  double t_ref = 0.0;
  std::vector<std::vector<MCEstimate>> survival;  // [x][t]
};

// -slope of log P_x(tau_D > t) over t_grid, pooled over x_list with a common slope and
// binomial weights. Raises RegimeError if the pooled fit has R^2 < min_r2.
EigenFit fit_eigenvalue(const Simulator& sim, const Domain& d, std::span<const Point> x_list,
                        std::span<const double> t_grid, std::size_t n, double min_r2 = 0.95);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct BoundReport {
  std::vector<double> ratios;  // NaN for excluded cells
  std::vector<bool> included;
  std::size_t excluded = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  SandwichWindow window;
  double ceiling = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::optional<std::size_t> min_cell;
  std::optional<std::size_t> max_cell;
};

// Cells with no hits or relative standard error above max_rel_se are excluded.
BoundReport ratio_report(std::span<const MCEstimate> estimates, std::span<const double> bounds,
                         double ceiling, double max_rel_se = 0.3);

// ---------------------------------------------------------------------------------------

template <Region R>
MCEstimate mc_exit_time_region(const Simulator& sim, const R& region, std::span<const double> x,
                               std::size_t n) {
  struct Acc {
    MeanAccumulator tau;
    std::uint64_t alive = 0;
    void merge(const Acc& o) {
      tau.merge(o.tau);
      alive += o.alive;
    }
  };
  if (n == 0) throw ArgumentError("estimators need n >= 1");
  const Acc acc = run_paths<Acc>(n, sim.cfg.seed, sim.cfg.stream, sim.par,
                                 [&](std::uint64_t, Rng& rng, Acc& a) {
                                   const auto r = simulate_killed_path(region, sim.kappa, *sim.law,
                                                                       x, sim.cfg, rng);
                                   if (r.exited) {
                                     a.tau.add(r.exit_time);
                                   } else {
                                     a.tau.add(sim.cfg.horizon);
                                     ++a.alive;
                                   }
                                 });
  MCEstimate e;
  e.value = acc.tau.mean();
  e.std_error = acc.tau.std_error();
  e.n_paths = n;
  e.n_effective = n - acc.alive;
  e.alive_fraction = static_cast<double>(acc.alive) / static_cast<double>(n);
  e.truncated = e.alive_fraction > 1e-3;
  return e;
}

}  // namespace aniso
