#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsplace/pipeline.hpp"
#include "gsplace/tuner.hpp"

namespace gsplace {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json to_json(const RunReport& r, bool with_trace = false) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["design"] = r.design;
  j["flow"] = r.flow;
  j["config_hash"] = r.config_hash;
  j["schedule_model"] = r.schedule_model;
  j["seed"] = r.seed;
  j["times"] = {{"init", r.init_seconds}, {"refine", r.refine_seconds}, {"gp", r.gp_seconds}};
  j["initial_hpwl"] = r.initial_hpwl;
  j["hpwl"] = r.hpwl;
  j["overflow"] = r.overflow;
  j["iterations"] = r.iterations;
  j["stop_reason"] = r.stop_reason;
  j["ok"] = r.ok();
  if (!r.ok()) {
    j["failed_stage"] = r.failed_stage;
    j["error"] = r.error;
  }
  if (with_trace) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& it : r.trace)
      t.push_back({{"iteration", it.iteration}, {"hpwl", it.hpwl}, {"overflow", it.overflow},
                   {"lambda", it.lambda}, {"gamma", it.gamma}, {"schedule_param", it.schedule_param},
                   {"step", it.step}});
    j["trace"] = std::move(t);
  }
  return j;
}

/// Schema check for a report object; returns the list of violations.
inline std::vector<std::string> validate_report(const nlohmann::json& j) {
  std::vector<std::string> errs;
  auto need = [&](const char* key, bool (nlohmann::json::*is)() const noexcept) {
    if (!j.contains(key)) errs.push_back(std::string("missing '") + key + "'");
    else if (!(j[key].*is)()) errs.push_back(std::string("wrong type for '") + key + "'");
  };
  if (!j.is_object()) return {"report is not an object"};
  need("schema_version", &nlohmann::json::is_number_integer);
  need("design", &nlohmann::json::is_string);
  need("flow", &nlohmann::json::is_string);
  need("config_hash", &nlohmann::json::is_string);
  need("schedule_model", &nlohmann::json::is_string);
  need("seed", &nlohmann::json::is_number_unsigned);
  need("times", &nlohmann::json::is_object);
  need("initial_hpwl", &nlohmann::json::is_number);
  need("hpwl", &nlohmann::json::is_number);
  need("overflow", &nlohmann::json::is_number);
  need("iterations", &nlohmann::json::is_number_integer);
  need("stop_reason", &nlohmann::json::is_string);
  need("ok", &nlohmann::json::is_boolean);
  if (!errs.empty()) return errs;
  if (j["schema_version"] != kReportSchemaVersion) errs.push_back("unsupported schema_version");
  for (const char* stage : {"init", "refine", "gp"}) {
    if (!j["times"].contains(stage) || !j["times"][stage].is_number()) errs.push_back(std::string("times.") + stage + " missing");
    else if (j["times"][stage].get<double>() < 0.0) errs.push_back(std::string("times.") + stage + " is negative");
  }
  if (j["config_hash"].get<std::string>().size() != 16) errs.push_back("config_hash must be 16 hex digits");
  if (!j["ok"].get<bool>() && !(j.contains("failed_stage") && j["failed_stage"].is_string()))
    errs.push_back("failed report lacks failed_stage");
  return errs;
}

inline nlohmann::json to_json(const SeedSweepSummary& s) {
  return {{"schema_version", kReportSchemaVersion}, {"seeds", s.seeds},   {"hpwl", s.hpwl},
          {"min", s.min},                           {"max", s.max},       {"mean", s.mean},
          {"range_over_avg", s.range_over_avg()}};
}

inline nlohmann::json to_json(const Trial& t, const ParamSpace& space) {
  nlohmann::json p = nlohmann::json::object();
  for (std::size_t i = 0; i < space.size() && i < t.params.size(); ++i)
    p[space.params[i].name] = format_value(space.params[i], t.params[i]);
  nlohmann::json j{{"id", t.id}, {"params", p}, {"status", t.ok() ? "ok" : "failed"}};
  if (t.ok()) j["objectives"] = t.objectives;
  else j["error"] = t.error;
  return j;
}

}  // namespace gsplace
