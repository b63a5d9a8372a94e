#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gsplace/density.hpp"
#include "gsplace/error.hpp"
#include "gsplace/macro_schedule.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/poisson.hpp"
#include "gsplace/wirelength.hpp"

namespace gsplace {

struct PlacerConfig {
  double target_density = 0.9;
  /// Initial density weight relative to the gradient-norm ratio |∇W|₁/|∇D|₁.
  double density_weight = 8e-5;
  /// WA/LSE smoothing base, in bin widths.
  double gamma = 1.0;
  /// Initial step, in bin widths per unit of the largest preconditioned gradient.
  double learning_rate = 1.0;
  WirelengthModel wirelength = WirelengthModel::kWA;
  /// Per-iteration HPWL growth that leaves the density weight unchanged;
  /// 0 selects one percent of the initial HPWL.
  double ref_hpwl = 0.0;
  double lower_pcof = 0.95;
  double upper_pcof = 1.05;
  double epsilon = 1.0;
  int max_iterations = 1000;
  double stop_overflow = 0.1;
  /// Bin grid; 0 picks the power of two nearest 1.5·sqrt(#movables), clamped to [16, 128].
  int bins_x = 0;
  int bins_y = 0;

  void validate() const {
    if (!(target_density > 0.0) || target_density > 1.0)
      throw ConfigError("target_density must lie in (0, 1]");
    if (!(density_weight >= 0.0)) throw ConfigError("density_weight must be >= 0");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(learning_rate > 0.0)) throw ConfigError("GP_learning_rate must be > 0");
    if (!(ref_hpwl >= 0.0)) throw ConfigError("RePlAce_ref_hpwl must be >= 0");
    if (!(lower_pcof > 0.0 && lower_pcof <= upper_pcof))
      throw ConfigError("need 0 < RePlAce_LOWER_PCOF <= RePlAce_UPPER_PCOF");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    if (!(stop_overflow > 0.0 && stop_overflow < 1.0))
      throw ConfigError("stop_overflow must lie in (0, 1)");
    if (bins_x < 0 || bins_y < 0 || (bins_x > 0 && bins_x < 8) || (bins_y > 0 && bins_y < 8))
      throw ConfigError("placement grid needs at least 8 bins per axis");
  }
};

inline BinGrid placement_grid(const Netlist& nl, const PlacerConfig& cfg) {
  auto pick = [&](int requested) {
    if (requested > 0) return requested;
    const double want = 1.5 * std::sqrt(static_cast<double>(std::max<std::size_t>(nl.movable_count(), 1)));
    int n = 16;
    while (n < 128 && n * std::numbers::sqrt2 < want) n *= 2;
    return n;
  };
  return BinGrid(nl.region(), pick(cfg.bins_x), pick(cfg.bins_y));
}

/// γ = gamma·binSize·10^{2(τ−0.1)/0.9 − 1} with τ clamped to [0.1, 1]: ten bins
/// at full overflow, a tenth of a bin at the 0.1 target.
inline double wirelength_gamma(double base, double bin_size, double overflow) {
  const double tau = std::clamp(overflow, 0.1, 1.0);
  return base * bin_size * std::pow(10.0, 2.0 * (tau - 0.1) / 0.9 - 1.0);
}

/// Density-weight multiplier from the last HPWL change.
inline double density_weight_multiplier(double delta_hpwl, double ref_hpwl, double lower,
                                        double upper) {
  const double mu = std::pow(upper, 1.0 - delta_hpwl / ref_hpwl);
  return std::clamp(mu, lower, upper);
}

struct PlacerIteration {
  int iteration = 0;
  double hpwl = 0.0;
  double overflow = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double schedule_param = 0.0;
  double step = 0.0;
  double objective = 0.0;
};

enum class StopReason { kOverflowReached, kMaxIterations, kDiverged };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kOverflowReached: return "overflow";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kDiverged: return "diverged";
  }
  return "unknown";
}

struct PlacementResult {
  std::vector<Point> positions;  ///< lower-left
  std::vector<PlacerIteration> trace;
  int iterations = 0;
  StopReason stop = StopReason::kMaxIterations;
  double hpwl = 0.0;
  double overflow = 0.0;
};

/// Thrown when the objective turns non-finite; carries the trace so far.
class PlacementDiverged : public Error {
 public:
  PlacementDiverged(const std::string& what, std::vector<PlacerIteration> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<PlacerIteration>& trace() const noexcept { return trace_; }

 private:
  std::vector<PlacerIteration> trace_;
};

namespace detail {

/// Objective F = W + λ·D over movable centers.
class PlacementObjective {
 public:
  PlacementObjective(const Netlist& nl, const PlacerConfig& cfg, const ScheduleSpec& sched,
                     const BinGrid& grid)
      : nl_(nl),
        cfg_(cfg),
        wl_(nl),
        density_(nl, grid, cfg.target_density, sched),
        poisson_(grid, cfg.epsilon) {
    for (std::size_t i = 0; i < nl.size(); ++i)
      if (!nl.instance(i).fixed()) movable_.push_back(i);
    pins_.assign(nl.size(), 0.0);
    for (const Net& n : nl.nets())
      for (const Pin& p : n.pins) pins_[p.instance] += 1.0;
  }

  const std::vector<std::size_t>& movable() const { return movable_; }
  DensityModel& density() { return density_; }
  double pin_count(std::size_t i) const { return pins_[i]; }

  struct Eval {
    double wirelength = 0.0;
    double energy = 0.0;
    std::vector<Point> wl_grad;
    std::vector<Point> density_grad;
  };

  Eval evaluate(const std::vector<Point>& centers, double gamma, int t, bool with_grad) {
    Eval e;
    const std::vector<Point> ll = lower_lefts_of(nl_, centers);
    e.wirelength = wl_.evaluate(ll, gamma, cfg_.wirelength, with_grad ? &e.wl_grad : nullptr);
    const DensityGrid dg = density_.total_density(centers, t);
    const PoissonSolution sol = poisson_.solve(dg.rho, cfg_.target_density);
    e.energy = density_.energy(dg, sol);
    if (with_grad) e.density_grad = density_.gradient(centers, sol);
    return e;
  }

 private:
  const Netlist& nl_;
  const PlacerConfig& cfg_;
  WirelengthEvaluator wl_;
  DensityModel density_;
  PoissonSolver poisson_;
  std::vector<std::size_t> movable_;
  std::vector<double> pins_;
};

}  // namespace detail

/// Electrostatics-based global placement with Nesterov acceleration,
/// backtracking step control and scheduled macro charges.
inline PlacementResult run_global_placement(const Netlist& nl, const std::vector<Point>& init,
                                            const PlacerConfig& cfg, const ScheduleSpec& sched) {
  cfg.validate();
  sched.validate();
  if (init.size() != nl.size()) throw ConfigError("initial positions do not cover the netlist");
  const BinGrid grid = placement_grid(nl, cfg);
  const double bin_size = 0.5 * (grid.bin_w() + grid.bin_h());
  detail::PlacementObjective obj(nl, cfg, sched, grid);
  const auto& mov = obj.movable();

  PlacementResult res;
  std::vector<Point> u = centers_of(nl, init);
  for (std::size_t i : mov) u[i] = obj.density().clamp_center(i, u[i]);

  auto lower_left = [&](const std::vector<Point>& c) { return lower_lefts_of(nl, c); };
  double hpwl_now = hpwl(nl, lower_left(u));
  double overflow = placement_overflow(nl, lower_left(u), grid, cfg.target_density);
  res.hpwl = hpwl_now;
  res.overflow = overflow;
  if (mov.empty() || overflow <= cfg.stop_overflow) {
    res.positions = lower_left(u);
    res.stop = StopReason::kOverflowReached;
    return res;
  }
  const double ref_hpwl = cfg.ref_hpwl > 0.0 ? cfg.ref_hpwl : std::max(1e-9, 0.01 * hpwl_now);

  double gamma = wirelength_gamma(cfg.gamma, bin_size, overflow);
  std::vector<Point> v = u;
  auto ev = obj.evaluate(v, gamma, 0, true);

  double lambda = 0.0;
  {
    double wn = 0.0, dn = 0.0;
    for (std::size_t i : mov) {
      wn += std::abs(ev.wl_grad[i].x) + std::abs(ev.wl_grad[i].y);
      dn += std::abs(ev.density_grad[i].x) + std::abs(ev.density_grad[i].y);
    }
    lambda = dn > 0.0 ? cfg.density_weight * wn / dn : cfg.density_weight;
  }

  auto precond_grad = [&](const detail::PlacementObjective::Eval& e, double lam) {
    std::vector<Point> g(nl.size());
    for (std::size_t i : mov) {
      const double p = std::max(1.0, obj.pin_count(i) + lam * nl.instance(i).area() / grid.bin_area());
      g[i] = {(e.wl_grad[i].x + lam * e.density_grad[i].x) / p,
              (e.wl_grad[i].y + lam * e.density_grad[i].y) / p};
    }
    return g;
  };
  auto max_norm = [&](const std::vector<Point>& g) {
    double m = 0.0;
    for (std::size_t i : mov) m = std::max({m, std::abs(g[i].x), std::abs(g[i].y)});
    return m;
  };

  std::vector<Point> g = precond_grad(ev, lambda);
  double step = cfg.learning_rate * bin_size / std::max(max_norm(g), 1e-300);
  double a = 1.0;

  auto diff_norm = [&](const std::vector<Point>& p, const std::vector<Point>& q) {
    double s2 = 0.0;
    for (std::size_t i : mov) {
      const double dx = p[i].x - q[i].x, dy = p[i].y - q[i].y;
      s2 += dx * dx + dy * dy;
    }
    return std::sqrt(s2);
  };
  auto diverged = [&](int it, double f) {
    res.trace.push_back({it, hpwl_now, overflow, lambda, gamma, charge_state(it, sched).param, step, f});
    throw PlacementDiverged("objective became non-finite at iteration " + std::to_string(it), res.trace);
  };

  for (int it = 0; it < cfg.max_iterations; ++it) {
    // Nesterov step with the step length backtracked against a local
    // Lipschitz estimate |Δv| / |Δg|.
    const double a_next = 0.5 * (1.0 + std::sqrt(4.0 * a * a + 1.0));
    const double coef = (a - 1.0) / a_next;
    std::vector<Point> u_next = u, v_next = v, g_next;
    detail::PlacementObjective::Eval e_next;
    double alpha = step, alpha_hat = step;
    for (int tries = 0; tries < 10; ++tries) {
      for (std::size_t i : mov)
        u_next[i] = obj.density().clamp_center(i, {v[i].x - alpha * g[i].x, v[i].y - alpha * g[i].y});
      for (std::size_t i : mov)
        v_next[i] = obj.density().clamp_center(
            i, {u_next[i].x + coef * (u_next[i].x - u[i].x), u_next[i].y + coef * (u_next[i].y - u[i].y)});
      e_next = obj.evaluate(v_next, gamma, it + 1, true);
      const double f = e_next.wirelength + lambda * e_next.energy;
      if (!std::isfinite(f)) diverged(it, f);
      g_next = precond_grad(e_next, lambda);
      const double dg = diff_norm(g_next, g);
      alpha_hat = dg > 0.0 ? diff_norm(v_next, v) / dg : 2.0 * alpha;
      if (alpha_hat >= 0.95 * alpha) break;
      alpha = alpha_hat;
    }
    u = std::move(u_next);
    v = std::move(v_next);
    a = a_next;
    step = alpha_hat;

    const double hpwl_next = hpwl(nl, lower_left(u));
    overflow = placement_overflow(nl, lower_left(u), grid, cfg.target_density);
    lambda *= density_weight_multiplier(hpwl_next - hpwl_now, ref_hpwl, cfg.lower_pcof,
                                        cfg.upper_pcof);
    hpwl_now = hpwl_next;
    gamma = wirelength_gamma(cfg.gamma, bin_size, overflow);
    const double objective = e_next.wirelength + lambda * e_next.energy;
    res.trace.push_back({it, hpwl_now, overflow, lambda, gamma, charge_state(it, sched).param, step,
                         objective});
    res.iterations = it + 1;
    if (!std::isfinite(hpwl_now) || !std::isfinite(objective)) diverged(it, objective);
    if (overflow <= cfg.stop_overflow) {
      res.stop = StopReason::kOverflowReached;
      break;
    }
    g = precond_grad(e_next, lambda);
  }
  res.positions = lower_left(u);
  res.hpwl = hpwl_now;
  res.overflow = overflow;
  return res;
}

}  // namespace gsplace
