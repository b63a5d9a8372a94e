#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gsplace/area_hint.hpp"
#include "gsplace/config.hpp"
#include "gsplace/gsp_init.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/placer.hpp"
#include "gsplace/synthetic.hpp"
#include "gsplace/tuner.hpp"

namespace gsplace {

/// Side fraction of the centered window the random-init baseline samples from.
inline constexpr double kBaselineWindow = 0.05;

/// Which stages run. The four ablation flows and the baseline are presets.
struct FlowOptions {
  bool gsp_init = true;
  bool refine = true;
  bool schedule = true;

  static FlowOptions full() { return {true, true, true}; }
  /// Random init in a small central window, hard macros.
  static FlowOptions baseline() { return {false, false, false}; }
  /// Flow1..Flow4 of the ablation matrix.
  static FlowOptions ablation(int flow) {
    switch (flow) {
      case 1: return {true, false, false};
      case 2: return {true, true, false};
      case 3: return {true, false, true};
      case 4: return full();
      default: throw ConfigError("ablation flow must be 1..4");
    }
  }
  std::string name() const {
    if (!gsp_init) return refine || schedule ? "random+custom" : "baseline";
    if (refine && schedule) return "full";
    if (refine) return "gsp+refine";
    if (schedule) return "gsp+schedule";
    return "gsp";
  }
};

struct RunReport {
  std::string design;
  std::string flow;
  std::string config_hash;
  std::string schedule_model;
  std::uint64_t seed = 0;
  double init_seconds = 0.0;
  double refine_seconds = 0.0;
  double gp_seconds = 0.0;
  double initial_hpwl = 0.0;
  double hpwl = 0.0;
  double overflow = 0.0;
  int iterations = 0;
  std::string stop_reason;
  /// Empty on success; otherwise the stage that failed (init, refine, gp).
  std::string failed_stage;
  std::string error;
  std::vector<Point> positions;
  std::vector<PlacerIteration> trace;

  bool ok() const noexcept { return failed_stage.empty(); }
  double total_seconds() const noexcept { return init_seconds + refine_seconds + gp_seconds; }
};

namespace pipeline_detail {
inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace pipeline_detail

/// Initial placement for a flow: GSP (optionally refined) or the random baseline.
inline std::vector<Point> initial_placement(const Netlist& nl, const RunConfig& cfg, const FlowOptions& flow,
                                            RunReport* report = nullptr) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  std::vector<Point> pos;
  if (flow.gsp_init) {
    InitResult r = gsp_initialize(nl, cfg.init());
    pos = std::move(r.positions);
  } else {
    pos = positions_from_signal(nl, random_signal(nl, cfg.seed, kBaselineWindow));
  }
  if (report) report->init_seconds = pipeline_detail::seconds_since(t0);
  if (flow.refine) {
    t0 = clock::now();
    pos = refine(signal_from_positions(nl, pos), nl, cfg.hint()).positions;
    if (report) report->refine_seconds = pipeline_detail::seconds_since(t0);
  }
  return pos;
}

/// init → refine → (scheduled) global placement. Stage errors are captured in
/// the report rather than thrown.
inline RunReport run_pipeline(const DesignBundle& design, const RunConfig& cfg, const FlowOptions& flow) {
  RunReport rep;
  rep.design = design.source;
  rep.flow = flow.name();
  rep.config_hash = config_hash(cfg);
  rep.seed = cfg.seed;
  const Netlist& nl = design.netlist;
  std::string stage = "config";
  try {
    cfg.validate();
    ScheduleSpec sched = cfg.schedule();
    if (!flow.schedule) sched.model = ScheduleModel::kHard;
    rep.schedule_model = std::string(to_string(sched.model));
    stage = "init";
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    std::vector<Point> pos;
    if (flow.gsp_init) pos = gsp_initialize(nl, cfg.init()).positions;
    else pos = positions_from_signal(nl, random_signal(nl, cfg.seed, kBaselineWindow));
    rep.init_seconds = pipeline_detail::seconds_since(t0);
    if (flow.refine) {
      stage = "refine";
      t0 = clock::now();
      pos = refine(signal_from_positions(nl, pos), nl, cfg.hint()).positions;
      rep.refine_seconds = pipeline_detail::seconds_since(t0);
    }
    rep.initial_hpwl = hpwl(nl, pos);
    stage = "gp";
    t0 = clock::now();
    PlacementResult pr = run_global_placement(nl, pos, cfg.placer(), sched);
    rep.gp_seconds = pipeline_detail::seconds_since(t0);
    rep.hpwl = pr.hpwl;
    rep.overflow = pr.overflow;
    rep.iterations = pr.iterations;
    rep.stop_reason = to_string(pr.stop);
    rep.positions = std::move(pr.positions);
    rep.trace = std::move(pr.trace);
  } catch (const PlacementDiverged& e) {
    rep.failed_stage = stage;
    rep.error = e.what();
    rep.trace = e.trace();
    rep.stop_reason = to_string(StopReason::kDiverged);
  } catch (const std::exception& e) {
    rep.failed_stage = stage;
    rep.error = e.what();
  }
  return rep;
}

// ------------------------------------------------------------ sweeps

struct SeedSweepSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> hpwl;
  double min = 0.0, max = 0.0, mean = 0.0;
  double range_over_avg() const { return mean > 0.0 ? (max - min) / mean : 0.0; }
};

inline SeedSweepSummary summarize_hpwl(std::vector<std::uint64_t> seeds, std::vector<double> h) {
  SeedSweepSummary s;
  s.seeds = std::move(seeds);
  s.hpwl = std::move(h);
  if (s.hpwl.empty()) return s;
  s.min = *std::min_element(s.hpwl.begin(), s.hpwl.end());
  s.max = *std::max_element(s.hpwl.begin(), s.hpwl.end());
  for (double v : s.hpwl) s.mean += v;
  s.mean /= static_cast<double>(s.hpwl.size());
  return s;
}

/// Runs the flow with seeds cfg.seed, cfg.seed+1, ...; failed runs throw.
inline SeedSweepSummary seed_sweep(const DesignBundle& design, RunConfig cfg, int n_seeds,
                                   const FlowOptions& flow = FlowOptions::full(),
                                   std::vector<RunReport>* reports = nullptr) {
  if (n_seeds < 1) throw ConfigError("seed sweep needs at least one seed");
  std::vector<std::uint64_t> seeds;
  std::vector<double> h;
  const std::uint64_t first = cfg.seed;
  for (int k = 0; k < n_seeds; ++k) {
    cfg.seed = first + static_cast<std::uint64_t>(k);
    RunReport r = run_pipeline(design, cfg, flow);
    if (!r.ok()) throw Error("seed " + std::to_string(cfg.seed) + " failed in " + r.failed_stage + ": " + r.error);
    seeds.push_back(cfg.seed);
    h.push_back(r.hpwl);
    if (reports) reports->push_back(std::move(r));
  }
  return summarize_hpwl(std::move(seeds), std::move(h));
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct DensitySweepRow {
  double target_density = 0.0;
  std::string flow;
  RunReport report;
};

/// Pipeline and baseline at each target density.
inline std::vector<DensitySweepRow> density_sweep(const DesignBundle& design, RunConfig cfg,
                                                  const std::vector<double>& densities) {
  std::vector<DensitySweepRow> rows;
  for (double d : densities) {
    cfg.target_density = d;
    for (const FlowOptions& f : {FlowOptions::full(), FlowOptions::baseline()}) {
      RunReport r = run_pipeline(design, cfg, f);
      r.positions.clear();
      r.trace.clear();
      rows.push_back({d, f.name(), std::move(r)});
    }
  }
  return rows;
}

// ------------------------------------------------------------ tuning

/// Tunable parameters with the ranges searched by default.
inline ParamSpace default_param_space() {
  ParamSpace s;
  s.params = {
      ParamDesc::real("low_filter_sigma", 0.0, 8.0),
      ParamDesc::real("mid_filter_sigma", 0.0, 8.0),
      ParamDesc::real("high_filter_sigma", 0.0, 8.0),
      ParamDesc::integer("low_filter_k", 1, 8),
      ParamDesc::integer("mid_filter_k", 1, 6),
      ParamDesc::integer("high_filter_k", 1, 6),
      ParamDesc::real("low_filter_effect", 0.0, 1.0),
      ParamDesc::real("mid_filter_effect", 0.0, 1.0),
      ParamDesc::integer("refine_iteration", 0, 6),
      ParamDesc::categorical("refine_num_bin_xy", {"16", "32", "64"}),
      ParamDesc::real("detection_ratio", 0.02, 0.3),
      ParamDesc::real("bin_capacity", 0.5, 1.0),
      ParamDesc::integer("schedule_iteration", 50, 500),
      ParamDesc::real("sigma_factor", 0.005, 0.5, true),
      ParamDesc::real("density_weight", 1e-5, 1e-1, true),
      ParamDesc::real("gamma", 0.5, 4.0),
      ParamDesc::real("GP_learning_rate", 0.1, 3.0, true),
      ParamDesc::categorical("GP_wirelength", {"WA", "LSE"}),
      ParamDesc::real("RePlAce_LOWER_PCOF", 0.85, 0.99),
      ParamDesc::real("RePlAce_UPPER_PCOF", 1.01, 1.2),
  };
  return s;
}

/// Writes an assignment into a config. Filter effects whose sum exceeds one
/// are scaled down proportionally so the high-band weight stays >= 0.
inline RunConfig apply_assignment(RunConfig cfg, const ParamSpace& space, const Assignment& a) {
  for (std::size_t i = 0; i < space.size(); ++i)
    set_config_value(cfg, space.params[i].name, format_value(space.params[i], a[i]));
  const double s = cfg.low_filter_effect + cfg.mid_filter_effect;
  if (s > 1.0) {
    cfg.low_filter_effect /= s;
    cfg.mid_filter_effect = 1.0 - cfg.low_filter_effect;
  }
  return cfg;
}

/// The config's own values as an assignment (used as the warm start).
inline Assignment assignment_from_config(const RunConfig& cfg, const ParamSpace& space) {
  Assignment a(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const ParamDesc& p = space.params[i];
    const std::string v = get_config_value(cfg, p.name);
    if (p.kind == ParamKind::kCategorical) {
      const auto it = std::find(p.choices.begin(), p.choices.end(), v);
      if (it == p.choices.end()) throw ConfigError("config value '" + v + "' is not a choice of " + p.name);
      a[i] = static_cast<double>(it - p.choices.begin());
    } else {
      a[i] = std::clamp(std::stod(v), p.lo, p.hi);
    }
  }
  return a;
}

/// Objectives (HPWL, overflow, runtime seconds) of the full flow, summed over designs.
inline TrialEvaluator pipeline_evaluator(const std::vector<const DesignBundle*>& designs, const RunConfig& base,
                                         const ParamSpace& space) {
  return [designs, base, space](const Assignment& a) {
    const RunConfig cfg = apply_assignment(base, space, a);
    double h = 0.0, ovf = 0.0, secs = 0.0;
    for (const DesignBundle* d : designs) {
      const RunReport r = run_pipeline(*d, cfg, FlowOptions::full());
      if (!r.ok()) throw Error(r.failed_stage + ": " + r.error);
      h += r.hpwl;
      ovf = std::max(ovf, r.overflow);
      secs += r.total_seconds();
    }
    return std::vector<double>{h, ovf, secs};
  };
}

}  // namespace gsplace
