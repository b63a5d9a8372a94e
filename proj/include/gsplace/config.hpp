#pragma once

// Run configuration.
//
// Grammar (one entry per line):
//   line    := blank | comment | section | entry
//   comment := ('#' | ';') any*
//   section := '[' name ']'          -- one of init, refine, schedule, placer, run
//   entry   := key '=' value         -- whitespace around key/value is trimmed
// Keys are unique across sections. Inside a section only that section's keys
// are accepted; before the first section header any key is accepted.
// Repeated keys: the last one wins.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gsplace/area_hint.hpp"
#include "gsplace/error.hpp"
#include "gsplace/gsp_init.hpp"
#include "gsplace/macro_schedule.hpp"
#include "gsplace/placer.hpp"
#include "gsplace/signed_graph.hpp"

namespace gsplace {

struct RunConfig {
  // GSP initialization
  double low_filter_sigma = 4.0;
  double mid_filter_sigma = 4.0;
  double high_filter_sigma = 2.0;
  int low_filter_k = 4;
  int mid_filter_k = 2;
  int high_filter_k = 2;
  double low_filter_effect = 0.5;
  double mid_filter_effect = 0.3;
  double init_window = 1.0;
  // Area-hint refinement
  int refine_iteration = 3;
  int refine_num_bin_xy = 32;
  double detection_ratio = 0.1;
  double bin_capacity = 0.9;
  double refine_relaxation = 0.5;
  // Macro schedule
  int schedule_iteration = 300;
  double sigma_factor = 0.05;
  double k_factor = 2.0;
  ScheduleModel schedule_model = ScheduleModel::kExponential;
  // Global placement
  double density_weight = 8e-5;
  double gamma = 1.0;
  double GP_learning_rate = 1.0;
  WirelengthModel GP_wirelength = WirelengthModel::kWA;
  double RePlAce_ref_hpwl = 0.0;
  double RePlAce_LOWER_PCOF = 0.95;
  double RePlAce_UPPER_PCOF = 1.05;
  int GP_max_iterations = 1000;
  double stop_overflow = 0.1;
  int GP_num_bins = 0;
  // Run
  double target_density = 0.9;
  std::uint64_t seed = 1;

  double high_filter_effect() const { return 1.0 - low_filter_effect - mid_filter_effect; }

  BandFilterSpec filter() const {
    return BandFilterSpec::from_effects(low_filter_effect, mid_filter_effect,
                                        {low_filter_sigma, low_filter_k, 0.0},
                                        {mid_filter_sigma, mid_filter_k, 0.0},
                                        {high_filter_sigma, high_filter_k, 0.0});
  }

  InitConfig init() const {
    InitConfig c;
    c.filter = filter();
    c.seed = seed;
    c.window = init_window;
    return c;
  }

  HintConfig hint() const {
    HintConfig c;
    c.iterations = refine_iteration;
    c.bins_x = c.bins_y = refine_num_bin_xy;
    c.detection_ratio = detection_ratio;
    c.capacity = bin_capacity;
    c.relaxation = refine_relaxation;
    return c;
  }

  ScheduleSpec schedule() const {
    ScheduleSpec s;
    s.model = schedule_model;
    s.horizon = schedule_iteration;
    s.sigma_factor = sigma_factor;
    s.k_factor = k_factor;
    return s;
  }

  PlacerConfig placer() const {
    PlacerConfig p;
    p.target_density = target_density;
    p.density_weight = density_weight;
    p.gamma = gamma;
    p.learning_rate = GP_learning_rate;
    p.wirelength = GP_wirelength;
    p.ref_hpwl = RePlAce_ref_hpwl;
    p.lower_pcof = RePlAce_LOWER_PCOF;
    p.upper_pcof = RePlAce_UPPER_PCOF;
    p.max_iterations = GP_max_iterations;
    p.stop_overflow = stop_overflow;
    p.bins_x = p.bins_y = GP_num_bins;
    return p;
  }

  void validate() const {
    if (low_filter_effect < 0.0 || mid_filter_effect < 0.0)
      throw ConfigError("filter effects must be >= 0");
    if (low_filter_effect + mid_filter_effect > 1.0 + 1e-12)
      throw ConfigError("low_filter_effect + mid_filter_effect must be <= 1");
    filter().validate();
    if (!(init_window > 0.0) || init_window > 1.0) throw ConfigError("init_window must lie in (0, 1]");
    hint().validate();
    schedule().validate();
    placer().validate();
  }
};

/// Accessor for one configuration key.
struct ConfigKey {
  std::string_view section;
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

inline long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  return out;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class M>
ConfigKey real(std::string_view section, std::string_view name, M RunConfig::*member) {
  return {section, name, [name, member](RunConfig& c, std::string_view v) { c.*member = to_double(name, v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

inline ConfigKey integer(std::string_view section, std::string_view name, int RunConfig::*member) {
  return {section, name,
          [name, member](RunConfig& c, std::string_view v) {
            const long long x = to_int(name, v);
            if (x < -1000000000LL || x > 1000000000LL)
              throw ConfigError("key '" + std::string(name) + "' is out of range");
            c.*member = static_cast<int>(x);
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

}  // namespace config_detail

/// Every recognized key, in canonical order.
inline const std::vector<ConfigKey>& config_keys() {
  using namespace config_detail;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back(real("init", "low_filter_sigma", &RunConfig::low_filter_sigma));
    k.push_back(real("init", "mid_filter_sigma", &RunConfig::mid_filter_sigma));
    k.push_back(real("init", "high_filter_sigma", &RunConfig::high_filter_sigma));
    k.push_back(integer("init", "low_filter_k", &RunConfig::low_filter_k));
    k.push_back(integer("init", "mid_filter_k", &RunConfig::mid_filter_k));
    k.push_back(integer("init", "high_filter_k", &RunConfig::high_filter_k));
    k.push_back(real("init", "low_filter_effect", &RunConfig::low_filter_effect));
    k.push_back(real("init", "mid_filter_effect", &RunConfig::mid_filter_effect));
    k.push_back(real("init", "init_window", &RunConfig::init_window));
    k.push_back(integer("refine", "refine_iteration", &RunConfig::refine_iteration));
    k.push_back(integer("refine", "refine_num_bin_xy", &RunConfig::refine_num_bin_xy));
    k.push_back(real("refine", "detection_ratio", &RunConfig::detection_ratio));
    k.push_back(real("refine", "bin_capacity", &RunConfig::bin_capacity));
    k.push_back(real("refine", "refine_relaxation", &RunConfig::refine_relaxation));
    k.push_back(integer("schedule", "schedule_iteration", &RunConfig::schedule_iteration));
    k.push_back(real("schedule", "sigma_factor", &RunConfig::sigma_factor));
    k.push_back(real("schedule", "k_factor", &RunConfig::k_factor));
    k.push_back({"schedule", "schedule_model",
                 [](RunConfig& c, std::string_view v) { c.schedule_model = parse_schedule_model(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.schedule_model)); }});
    k.push_back(real("placer", "density_weight", &RunConfig::density_weight));
    k.push_back(real("placer", "gamma", &RunConfig::gamma));
    k.push_back(real("placer", "GP_learning_rate", &RunConfig::GP_learning_rate));
    k.push_back({"placer", "GP_wirelength",
                 [](RunConfig& c, std::string_view v) { c.GP_wirelength = parse_wirelength_model(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.GP_wirelength)); }});
    k.push_back(real("placer", "RePlAce_ref_hpwl", &RunConfig::RePlAce_ref_hpwl));
    k.push_back(real("placer", "RePlAce_LOWER_PCOF", &RunConfig::RePlAce_LOWER_PCOF));
    k.push_back(real("placer", "RePlAce_UPPER_PCOF", &RunConfig::RePlAce_UPPER_PCOF));
    k.push_back(integer("placer", "GP_max_iterations", &RunConfig::GP_max_iterations));
    k.push_back(real("placer", "stop_overflow", &RunConfig::stop_overflow));
    k.push_back(integer("placer", "GP_num_bins", &RunConfig::GP_num_bins));
    k.push_back(real("run", "target_density", &RunConfig::target_density));
    k.push_back({"run", "seed",
                 [](RunConfig& c, std::string_view v) {
                   const long long s = to_int("seed", v);
                   if (s < 0) throw ConfigError("seed must be >= 0");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    return k;
  }();
  return keys;
}

inline const ConfigKey* find_config_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

/// Sets one key from its text form. Does not re-validate the whole config.
inline void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const ConfigKey* k = find_config_key(key);
  if (!k) throw ConfigError("unknown config key '" + std::string(key) + "'");
  k->set(cfg, value);
}

inline std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  const ConfigKey* k = find_config_key(key);
  if (!k) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return k->get(cfg);
}

/// Parses config text; `origin` names the source in error messages.
inline RunConfig parse_config(std::string_view text, const std::string& origin = "<config>") {
  RunConfig cfg;
  std::string section;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = config_detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = config_detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "init" && section != "refine" && section != "schedule" && section != "placer" &&
          section != "run")
        fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = config_detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = config_detail::trim(std::string_view(line).substr(eq + 1));
    const ConfigKey* k = find_config_key(key);
    if (!k) fail("unknown key '" + key + "'");
    if (!section.empty() && k->section != section)
      fail("key '" + key + "' belongs to section [" + std::string(k->section) + "]");
    if (value.empty()) fail("key '" + key + "' has no value");
    try {
      k->set(cfg, value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

/// Canonical text form: every key in table order, grouped by section.
inline std::string dump_config(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = std::string(k.section);
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

/// FNV-1a of the canonical dump, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump_config(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gsplace
