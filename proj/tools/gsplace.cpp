// gsplace command-line driver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsplace/gsplace.hpp"

namespace fs = std::filesystem;
using namespace gsplace;

namespace {

/// Parses "synthetic:cells=500,macros=4,seed=3" style specs.
SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synthetic spec item '" + item + "' lacks '='");
    const std::string k = item.substr(0, eq), v = item.substr(eq + 1);
    try {
      if (k == "cells") s.cells = std::stoi(v);
      else if (k == "macros") s.macros = std::stoi(v);
      else if (k == "io_pins") s.io_pins = std::stoi(v);
      else if (k == "seed") s.seed = std::stoull(v);
      else if (k == "mean_degree") s.mean_degree = std::stod(v);
      else if (k == "clustering") s.clustering = std::stod(v);
      else if (k == "utilization") s.utilization = std::stod(v);
      else if (k == "macro_size_min") s.macro_size_min = std::stod(v);
      else if (k == "macro_size_max") s.macro_size_max = std::stod(v);
      else if (k == "width") s.region_width = std::stod(v);
      else if (k == "height") s.region_height = std::stod(v);
      else throw ConfigError("unknown synthetic spec key '" + k + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad value for synthetic spec key '" + k + "'");
    }
  }
  return s;
}

DesignBundle load_design(const std::string& source) {
  constexpr std::string_view prefix = "synthetic:";
  if (source.rfind(prefix, 0) == 0) return generate_synthetic(parse_synthetic_spec(source.substr(prefix.size())));
  return parse_design(source);
}

std::string design_stem(const std::string& source) {
  if (source.rfind("synthetic:", 0) == 0) return "synthetic";
  return fs::path(source).stem().string();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

/// Options shared by every subcommand that runs a stage.
struct Common {
  std::string design;
  std::string config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> key_flags;
  std::string schedule_model;
  long long seed = -1;

  RunConfig config_value() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    for (const auto& [k, v] : key_flags)
      if (!v.empty()) set_config_value(c, k, v);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!schedule_model.empty()) c.schedule_model = parse_schedule_model(schedule_model);
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, Common& c, bool need_design = true) {
  auto* d = cmd->add_option("-d,--design", c.design, "Bookshelf .aux path or synthetic:cells=N,macros=M,seed=S");
  if (need_design) d->required();
  cmd->add_option("-c,--config", c.config, "Run configuration file");
  cmd->add_option("--set", c.sets, "Override a config key (key=value), repeatable");
  cmd->add_option("--schedule-model", c.schedule_model, "none | gaussian | exp | linear | sigmoid");
  cmd->add_option("--seed", c.seed, "Random seed for the initial graph signal");
  for (const auto& k : config_keys()) {
    const std::string name(k.name);
    if (name == "seed" || name == "schedule_model") continue;
    cmd->add_option("--" + name, c.key_flags[name], "Config key " + name)->group("Config keys");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-size global placement with spectral initialization and macro schedules"};
  app.require_subcommand(1);

  Common common;
  std::string out, pl_in, report_path, out_dir, svg_path;
  bool skip_refine = false, skip_schedule = false, skip_gsp = false, with_trace = false;
  int flow_id = 0, n_seeds = 10, budget = 100, distill_k = 5;
  std::string densities = "0.6,0.7,0.8,0.9,1.0";
  long long tune_seed = 1;

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic design and export it as Bookshelf");
  std::string spec_text = "cells=500,macros=4,seed=1", name = "synthetic";
  gen->add_option("--spec", spec_text, "cells=N,macros=M,seed=S,...");
  gen->add_option("--name", name, "Base file name");
  gen->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* init = app.add_subcommand("init", "GSP initialization only");
  add_common(init, common);
  init->add_option("-o,--out", out, "Output .pl")->required();

  auto* ref = app.add_subcommand("refine", "GSP initialization followed by area-hint refinement");
  add_common(ref, common);
  ref->add_option("--init-pl", pl_in, "Start from this placement instead of GSP initialization");
  ref->add_option("-o,--out", out, "Output .pl")->required();

  auto* place = app.add_subcommand("place", "Global placement from a given placement");
  add_common(place, common);
  place->add_option("--init-pl", pl_in, "Initial placement (default: positions in the design)");
  place->add_option("-o,--out", out, "Output .pl")->required();
  place->add_option("--report", report_path, "Metrics JSON");

  auto* pipe = app.add_subcommand("pipeline", "init -> refine -> scheduled global placement");
  add_common(pipe, common);
  pipe->add_option("-o,--out-dir", out_dir, "Output directory")->required();
  pipe->add_flag("--skip-refine", skip_refine, "Skip area-hint refinement");
  pipe->add_flag("--skip-schedule", skip_schedule, "Use hard macro footprints from the start");
  pipe->add_flag("--random-init", skip_gsp, "Random initialization baseline (implies no refine/schedule)");
  pipe->add_option("--flow", flow_id, "Ablation flow 1..4")->check(CLI::Range(1, 4));
  pipe->add_option("--svg", svg_path, "Also render the final placement");
  pipe->add_flag("--trace", with_trace, "Include the per-iteration trace in the report");

  auto* eval = app.add_subcommand("eval", "HPWL and overflow of a placement");
  add_common(eval, common);
  eval->add_option("--pl", pl_in, "Placement to evaluate (default: positions in the design)");

  auto* plot = app.add_subcommand("plot", "Render a placement as SVG");
  add_common(plot, common);
  plot->add_option("--pl", pl_in, "Placement (default: positions in the design)");
  plot->add_option("-o,--out", out, "Output .svg")->required();

  auto* sdump = app.add_subcommand("schedule-dump", "Tabulate eta, sigma and k over the schedule");
  add_common(sdump, common, false);
  sdump->add_option("-o,--out", out, "Output CSV (default: stdout)");

  auto* sweep = app.add_subcommand("seed-sweep", "HPWL statistics over initial-signal seeds");
  add_common(sweep, common);
  sweep->add_option("-n,--seeds", n_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("-o,--out", out, "Summary JSON (default: stdout)");

  auto* dsweep = app.add_subcommand("density-sweep", "Pipeline vs baseline over target densities");
  add_common(dsweep, common);
  dsweep->add_option("--densities", densities, "Comma-separated target densities");
  dsweep->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* tune = app.add_subcommand("tune", "Multi-objective parameter search");
  add_common(tune, common);
  tune->add_option("--budget", budget, "Number of trials")->check(CLI::PositiveNumber);
  tune->add_option("--tune-seed", tune_seed, "Tuner seed");
  tune->add_option("-k,--distill", distill_k, "Representatives to keep from the front");
  tune->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const DesignBundle b = generate_synthetic(parse_synthetic_spec(spec_text));
      std::cout << write_design(b.netlist, b.positions, out_dir, name).string() << "\n";
      return 0;
    }
    if (sdump->parsed()) {
      const ScheduleSpec s = common.config_value().schedule();
      std::ostringstream csv;
      csv << "t,eta,sigma,k,param,snapped\n";
      for (int t = 0; t <= s.horizon; ++t) {
        const ChargeState st = charge_state(t, s);
        csv << t << ',' << eta_schedule(t, s.horizon, s) << ',' << sigma_schedule(t, s.horizon, s.sigma_factor, s.sigma_min)
            << ',' << k_schedule(t, s.horizon, s.k_factor, s.k_min, s.k_cap) << ',' << st.param << ','
            << (st.snapped ? 1 : 0) << '\n';
      }
      if (out.empty()) std::cout << csv.str();
      else write_text(out, csv.str());
      return 0;
    }

    const RunConfig cfg = common.config_value();
    const DesignBundle design = load_design(common.design);
    const Netlist& nl = design.netlist;
    const std::vector<Point> loaded = pl_in.empty() ? design.positions : read_pl(nl, pl_in);

    if (init->parsed()) {
      const InitResult r = gsp_initialize(nl, cfg.init());
      if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
      write_pl(nl, r.positions, out);
    } else if (ref->parsed()) {
      const std::vector<Point> start = pl_in.empty() ? gsp_initialize(nl, cfg.init()).positions : loaded;
      write_pl(nl, refine(signal_from_positions(nl, start), nl, cfg.hint()).positions, out);
    } else if (place->parsed()) {
      const PlacementResult r = run_global_placement(nl, loaded, cfg.placer(), cfg.schedule());
      write_pl(nl, r.positions, out);
      nlohmann::json j{{"hpwl", r.hpwl}, {"overflow", r.overflow}, {"iterations", r.iterations},
                       {"stop_reason", to_string(r.stop)}};
      if (!report_path.empty()) write_text(report_path, j.dump(2) + "\n");
      std::cout << j.dump() << "\n";
    } else if (pipe->parsed()) {
      FlowOptions flow = flow_id ? FlowOptions::ablation(flow_id) : FlowOptions::full();
      if (skip_gsp) flow = FlowOptions::baseline();
      if (skip_refine) flow.refine = false;
      if (skip_schedule) flow.schedule = false;
      const RunReport r = run_pipeline(design, cfg, flow);
      const std::string stem = design_stem(common.design);
      fs::create_directories(out_dir);
      const nlohmann::json j = to_json(r, with_trace);
      write_text(fs::path(out_dir) / (stem + ".report.json"), j.dump(2) + "\n");
      if (!r.ok()) {
        std::cerr << "error: stage " << r.failed_stage << ": " << r.error << "\n";
        return 2;
      }
      write_pl(nl, r.positions, fs::path(out_dir) / (stem + ".gp.pl"));
      if (!svg_path.empty()) write_text(svg_path, render_placement_svg(nl, r.positions));
      std::cout << j.dump() << "\n";
    } else if (eval->parsed()) {
      const PlacerConfig pc = cfg.placer();
      const nlohmann::json j{{"hpwl", hpwl(nl, loaded)},
                             {"overflow", placement_overflow(nl, loaded, placement_grid(nl, pc), pc.target_density)},
                             {"movable", nl.movable_count()},
                             {"fixed", nl.fixed_count()},
                             {"nets", nl.nets().size()}};
      std::cout << j.dump() << "\n";
    } else if (plot->parsed()) {
      write_text(out, render_placement_svg(nl, loaded));
    } else if (sweep->parsed()) {
      const SeedSweepSummary s = seed_sweep(design, cfg, n_seeds);
      const std::string text = to_json(s).dump(2) + "\n";
      if (out.empty()) std::cout << text;
      else write_text(out, text);
    } else if (dsweep->parsed()) {
      const auto rows = density_sweep(design, cfg, parse_list(densities));
      std::ostringstream csv;
      csv << "target_density,flow,hpwl,overflow,iterations,gp_seconds,ok\n";
      PlotSeries full{"full", "#1f77b4", {}, {}}, base{"baseline", "#d62728", {}, {}};
      for (const auto& row : rows) {
        csv << row.target_density << ',' << row.flow << ',' << row.report.hpwl << ',' << row.report.overflow << ','
            << row.report.iterations << ',' << row.report.gp_seconds << ',' << (row.report.ok() ? 1 : 0) << '\n';
        if (!row.report.ok()) continue;
        PlotSeries& s = row.flow == "baseline" ? base : full;
        s.x.push_back(row.target_density);
        s.y.push_back(row.report.hpwl);
      }
      write_text(fs::path(out_dir) / "density_sweep.csv", csv.str());
      write_text(fs::path(out_dir) / "density_sweep.svg", render_line_plot({full, base}, "target density", "HPWL"));
      std::cout << csv.str();
    } else if (tune->parsed()) {
      fs::create_directories(out_dir);
      const ParamSpace space = default_param_space();
      std::ofstream log(fs::path(out_dir) / "trials.jsonl", std::ios::trunc);
      TunerOptions opt;
      opt.budget = budget;
      opt.seed = static_cast<std::uint64_t>(tune_seed);
      opt.warm_start = assignment_from_config(cfg, space);
      opt.on_trial = [&](const Trial& t) { log << to_json(t, space).dump() << "\n" << std::flush; };
      const TunerResult res = run_tuner(pipeline_evaluator({&design}, cfg, space), space, opt);
      std::vector<std::vector<double>> objs;
      for (std::size_t i : res.front) objs.push_back(res.trials[i].objectives);
      const auto reps = distill(objs, distill_k);
      nlohmann::json front = nlohmann::json::array(), picked = nlohmann::json::array();
      std::ostringstream csv;
      csv << "id,hpwl,overflow,runtime";
      for (const auto& p : space.params) csv << ',' << p.name;
      csv << '\n';
      for (std::size_t i : res.front) {
        const Trial& t = res.trials[i];
        front.push_back(to_json(t, space));
        csv << t.id << ',' << t.objectives[0] << ',' << t.objectives[1] << ',' << t.objectives[2];
        for (std::size_t d = 0; d < space.size(); ++d) csv << ',' << format_value(space.params[d], t.params[d]);
        csv << '\n';
      }
      for (std::size_t r : reps) picked.push_back(to_json(res.trials[res.front[r]], space));
      write_text(fs::path(out_dir) / "front.json", front.dump(2) + "\n");
      write_text(fs::path(out_dir) / "front.csv", csv.str());
      write_text(fs::path(out_dir) / "distilled.json", picked.dump(2) + "\n");
      std::cout << "trials " << res.trials.size() << ", front " << res.front.size() << ", distilled " << reps.size()
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
