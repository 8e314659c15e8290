#include "aniso/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {

void need_paths(std::size_t n) {
  if (n == 0) throw ArgumentError("estimators need n >= 1");
}

struct Box {
  std::span<const double> y;
  std::span<const double> h;
  double volume = 1.0;

  Box(std::span<const double> centre, std::span<const double> half, std::size_t dim) : y(centre), h(half) {
    if (y.size() != dim || h.size() != dim) throw ArgumentError("box dimension differs from the point dimension");
    for (double v : h) {
      if (!(v > 0.0)) throw ArgumentError("box half-widths must be positive");
      volume *= 2.0 * v;
    }
  }
  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(std::abs(x[i] - y[i]) < h[i])) return false;
    }
    return true;
  }
  // All corners inside D.
  void require_inside(const Domain& d) const {
    const std::size_t dim = y.size();
    Point c(dim);
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
      for (std::size_t i = 0; i < dim; ++i) c[i] = y[i] + ((mask >> i) & 1u ? h[i] : -h[i]);
      if (!(d.depth(c) > 0.0)) throw ArgumentError("estimation box is not contained in the domain");
    }
  }
};

struct HitAcc {
  std::uint64_t hits = 0;
  std::uint64_t alive = 0;
  void merge(const HitAcc& o) {
    hits += o.hits;
    alive += o.alive;
  }
};

MCEstimate box_estimate(std::uint64_t hits, std::size_t n, double volume) {
  MCEstimate e;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  e.n_paths = n;
  e.n_effective = hits;
  e.value = p / volume;
  // Zero hits: one-sided 95% bound (rule of three).
  e.std_error = hits == 0 ? 3.0 / nn / volume : std::sqrt(p * (1.0 - p) / nn) / volume;
  return e;
}

MCEstimate binomial(std::uint64_t hits, std::size_t n) {
  MCEstimate e = box_estimate(hits, n, 1.0);
  if (hits == 0) e.std_error = 0.0;
  return e;
}

}  // namespace

Simulator::Simulator(ScaleFunction f, KappaSpec k, SimConfig c, Parallel p)
    : phi(std::move(f)), kappa(std::move(k)), cfg(c), par(p) {
  cfg.validate();
  law = std::make_shared<const JumpLaw>(phi, cfg.eps_small_jump, cfg.eps_max);
}

Simulator Simulator::with_stream(std::uint64_t stream) const {
  Simulator s = *this;
  s.cfg.stream = stream;
  return s;
}

Simulator Simulator::with_horizon(double horizon) const {
  Simulator s = *this;
  s.cfg.horizon = horizon;
  s.cfg.validate();
  return s;
}

MCEstimate mc_survival(const Simulator& sim, const Domain& d, std::span<const double> x, double t,
                       std::size_t n) {
  const double grid[] = {t};
  return mc_survival_curve(sim, d, x, grid, n).front();
}

std::vector<MCEstimate> mc_survival_curve(const Simulator& sim, const Domain& d,
                                          std::span<const double> x, std::span<const double> t_grid,
                                          std::size_t n) {
  need_paths(n);
  if (t_grid.empty()) throw ArgumentError("survival curve needs a time grid");
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw DomainError("survival times must be >= 0");
  }
  struct Acc {
    std::vector<std::uint64_t> alive;
    void merge(const Acc& o) {
      if (alive.size() < o.alive.size()) alive.resize(o.alive.size(), 0);
      for (std::size_t k = 0; k < o.alive.size(); ++k) alive[k] += o.alive[k];
    }
  };
  const Simulator s = sim.with_horizon(*std::max_element(t_grid.begin(), t_grid.end()));
  const Acc acc = run_paths<Acc>(n, s.cfg.seed, s.cfg.stream, s.par, [&](std::uint64_t, Rng& rng, Acc& a) {
    if (a.alive.empty()) a.alive.assign(t_grid.size(), 0);
    const auto r = simulate_killed_path(d, s.kappa, *s.law, x, s.cfg, rng);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      if (!r.exited || r.exit_time > t_grid[k]) ++a.alive[k];
    }
  });
  std::vector<MCEstimate> out;
  out.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    out.push_back(binomial(acc.alive.empty() ? 0 : acc.alive[k], n));
  }
  return out;
}

MCEstimate mc_heat_kernel(const Simulator& sim, const Domain& d, double t, std::span<const double> x,
                          std::span<const double> y, std::span<const double> h, std::size_t n) {
  need_paths(n);
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const Box box(y, h, d.dim());
  box.require_inside(d);
  const Simulator s = sim.with_horizon(t);
  const HitAcc acc = run_paths<HitAcc>(n, s.cfg.seed, s.cfg.stream, s.par, [&](std::uint64_t, Rng& rng, HitAcc& a) {
    const auto r = simulate_killed_path(d, s.kappa, *s.law, x, s.cfg, rng);
    if (r.exited) return;
    ++a.alive;
    if (box.contains(r.position)) ++a.hits;
  });
  return box_estimate(acc.hits, n, box.volume);
}

MCEstimate mc_heat_kernel_free(const Simulator& sim, double t, std::span<const double> x,
                               std::span<const double> y, std::span<const double> h, std::size_t n) {
  need_paths(n);
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const std::size_t dim = x.size();
  const Box box(y, h, dim);
  if (!sim.kappa.is_one()) {
    const Domain free = Domain::full_space(dim);
    const Simulator s = sim.with_horizon(t);
    const HitAcc acc = run_paths<HitAcc>(n, s.cfg.seed, s.cfg.stream, s.par, [&](std::uint64_t, Rng& rng, HitAcc& a) {
      const auto r = simulate_killed_path(free, s.kappa, *s.law, x, s.cfg, rng);
      if (box.contains(r.position)) ++a.hits;
    });
    return box_estimate(acc.hits, n, box.volume);
  }
  const bool exact = sim.phi.kind() == ScaleKind::power;
  const double alpha = sim.phi.alpha();
  // No boundary to resolve, so the largest cutoff applies, as for a full-space path.
  const double eps = sim.cfg.eps_max;
  const HitAcc acc = run_paths<HitAcc>(n, sim.cfg.seed, sim.cfg.stream, sim.par, [&](std::uint64_t, Rng& rng, HitAcc& a) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double z = x[i] + (exact ? sample_stable_increment(alpha, t, rng)
                                     : sample_general_increment(*sim.law, t, eps, rng));
      if (!(std::abs(z - y[i]) < h[i])) return;
    }
    ++a.hits;
  });
  return box_estimate(acc.hits, n, box.volume);
}

MCEstimate mc_green(const Simulator& sim, const Domain& d, std::span<const double> x,
                    std::span<const double> y, std::span<const double> h, std::size_t n) {
  need_paths(n);
  if (!d.bounded()) throw ArgumentError("mc_green needs a bounded domain");
  const Box box(y, h, d.dim());
  box.require_inside(d);
  struct Acc {
    MeanAccumulator occupation;
    std::uint64_t alive = 0;
    std::uint64_t visits = 0;
    void merge(const Acc& o) {
      occupation.merge(o.occupation);
      alive += o.alive;
      visits += o.visits;
    }
  };
  struct Occupation {
    const Box* box;
    double time = 0.0;
    void hold(std::span<const double> p, double dt) {
      if (box->contains(p)) time += dt;
    }
  };
  const Acc acc = run_paths<Acc>(n, sim.cfg.seed, sim.cfg.stream, sim.par, [&](std::uint64_t, Rng& rng, Acc& a) {
    Occupation obs{&box};
    const auto r = simulate_killed_path(d, sim.kappa, *sim.law, x, sim.cfg, rng, obs);
    if (!r.exited) ++a.alive;
    if (obs.time > 0.0) ++a.visits;
    a.occupation.add(obs.time);
  });
  MCEstimate e;
  e.value = acc.occupation.mean() / box.volume;
  e.std_error = acc.occupation.std_error() / box.volume;
  e.n_paths = n;
  e.n_effective = acc.visits;
  e.alive_fraction = static_cast<double>(acc.alive) / static_cast<double>(n);
  e.truncated = e.alive_fraction > 1e-3;
  return e;
}

MCEstimate mc_exit_time(const Simulator& sim, const Domain& d, std::span<const double> x, std::size_t n) {
  return mc_exit_time_region(sim, d, x, n);
}

EigenFit fit_eigenvalue(const Simulator& sim, const Domain& d, std::span<const Point> x_list,
                        std::span<const double> t_grid, std::size_t n, double min_r2) {
  if (!d.bounded()) throw ArgumentError("fit_eigenvalue needs a bounded domain");
  if (x_list.empty()) throw ArgumentError("fit_eigenvalue needs start points");
  if (t_grid.size() < 2) throw ArgumentError("fit_eigenvalue needs at least two times");
  EigenFit fit;
  fit.t_ref = t_grid.front();
  std::vector<Series> groups(x_list.size());
  for (std::size_t k = 0; k < x_list.size(); ++k) {
    fit.survival.push_back(mc_survival_curve(sim.with_stream(sim.cfg.stream + k), d, x_list[k], t_grid, n));
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const MCEstimate& s = fit.survival[k][j];
      if (s.n_effective == 0) {
        throw RegimeError("no surviving path at t = " + std::to_string(t_grid[j]) +
                          "; shorten the time grid or add paths");
      }
      const double p = s.value;
      groups[k].x.push_back(t_grid[j]);
      groups[k].y.push_back(std::log(p));
      // var(log p) ~ (1 - p) / (n p)
      groups[k].w.push_back(p >= 1.0 ? static_cast<double>(n) * 1e6 : static_cast<double>(n) * p / (1.0 - p));
    }
  }
  const PooledFit pooled = fit_common_slope(groups);
  fit.lambda = -pooled.slope;
  fit.lambda_se = pooled.slope_se;
  fit.r2 = pooled.r2;
  if (fit.r2 < min_r2) {
    throw RegimeError("log-survival is not linear in t (R^2 = " + std::to_string(fit.r2) + ")");
  }
  for (std::size_t k = 0; k < x_list.size(); ++k) {
    fit.lambda_per_x.push_back(-fit_line(groups[k].x, groups[k].y, groups[k].w).slope);
    fit.profile.push_back(fit.survival[k].front().value * std::exp(fit.lambda * fit.t_ref));
  }
  return fit;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

BoundReport ratio_report(std::span<const MCEstimate> estimates, std::span<const double> bounds,
                         double ceiling, double max_rel_se) {
  if (estimates.size() != bounds.size()) throw ArgumentError("ratio_report: grids differ in size");
  if (!(ceiling > 1.0)) throw ArgumentError("ratio_report: ceiling must exceed 1");
  BoundReport rep;
  rep.ceiling = ceiling;
  rep.ratios.assign(estimates.size(), std::numeric_limits<double>::quiet_NaN());
  rep.included.assign(estimates.size(), false);
  std::vector<double> kept;
  bool degenerate = false;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const MCEstimate& e = estimates[k];
    if (e.n_effective == 0 || !(e.relative_error() <= max_rel_se)) {
      ++rep.excluded;
      continue;
    }
    const double r = e.value / bounds[k];
    rep.ratios[k] = r;
    rep.included[k] = true;
    if (!(std::isfinite(r) && r > 0.0)) {
      degenerate = true;
      continue;
    }
    kept.push_back(r);
    if (!rep.min_cell || r < rep.ratios[*rep.min_cell]) rep.min_cell = k;
    if (!rep.max_cell || r > rep.ratios[*rep.max_cell]) rep.max_cell = k;
  }
  if (kept.empty() && !degenerate) {
    rep.verdict = Verdict::inconclusive;
    return rep;
  }
  if (!kept.empty()) {
    rep.min = rep.ratios[*rep.min_cell];
    rep.max = rep.ratios[*rep.max_cell];
    rep.median = median(kept);
    rep.window = SandwichWindow(rep.min, rep.max);
  }
  rep.verdict = (!degenerate && rep.max / rep.min <= ceiling) ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace aniso
