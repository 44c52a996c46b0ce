#pragma once

// JSON configuration files: scenarios and sweep specifications. Both are
// flat objects; unknown keys are rejected so that misspelled parameters
// cannot silently fall back to defaults.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "cdrleak/analysis.hpp"
#include "cdrleak/error.hpp"
#include "cdrleak/model.hpp"
#include "json.hpp"

namespace cdrleak {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, std::string_view what) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw Error(ErrorCode::ConfigError, "unknown " + std::string(what) + " key '" + key + "'");
}

inline double number_field(const Json& j, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error(ErrorCode::ConfigError, "missing field '" + key + "'");
  }
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::ConfigError, "field '" + key + "' must be a number");
  return v.get<double>();
}

inline bool bool_field(const Json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw Error(ErrorCode::ConfigError, "field '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "'" + path + "': " + e.what());
  }
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
  detail::reject_unknown_keys(j,
                              {"fa", "fb", "g1", "g2", "c1", "c2", "h1", "h2", "lambda", "e_max", "tol_root",
                               "tol_opt", "damage_channel_enabled", "price_taker"},
                              "scenario");
  Scenario s;
  s.production = {detail::number_field(j, "fa"), detail::number_field(j, "fb")};
  s.damage = {detail::number_field(j, "g1"), detail::number_field(j, "g2")};
  s.extraction = {detail::number_field(j, "c1"), detail::number_field(j, "c2")};
  s.removal = {detail::number_field(j, "h1"), detail::number_field(j, "h2")};
  s.lambda = detail::number_field(j, "lambda");
  s.e_max = detail::number_field(j, "e_max");
  s.tol_root = detail::number_field(j, "tol_root", 1e-10);
  s.tol_opt = detail::number_field(j, "tol_opt", 1e-9);
  s.damage_channel_enabled = detail::bool_field(j, "damage_channel_enabled", true);
  s.price_taker = detail::bool_field(j, "price_taker", false);
  return s;
}

inline Json scenario_to_json(const Scenario& s) {
  return Json{{"fa", s.production.fa},
              {"fb", s.production.fb},
              {"g1", s.damage.g1},
              {"g2", s.damage.g2},
              {"c1", s.extraction.c1},
              {"c2", s.extraction.c2},
              {"h1", s.removal.h1},
              {"h2", s.removal.h2},
              {"lambda", s.lambda},
              {"e_max", s.e_max},
              {"tol_root", s.tol_root},
              {"tol_opt", s.tol_opt},
              {"damage_channel_enabled", s.damage_channel_enabled},
              {"price_taker", s.price_taker}};
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(detail::read_json_file(path)); }

/// Sweep file: {"base": {...}, "parameter": "c2", "values": [...],
/// "outputs": [...], "point": {"ea": 4, "r": 1}}. `base` may be omitted
/// when a base scenario is supplied separately.
inline SweepSpec sweep_from_json(const Json& j, const std::optional<Scenario>& base = std::nullopt) {
  detail::reject_unknown_keys(j, {"base", "parameter", "values", "outputs", "point"}, "sweep");
  SweepSpec spec;
  if (j.contains("base"))
    spec.base = scenario_from_json(j.at("base"));
  else if (base)
    spec.base = *base;
  else
    throw Error(ErrorCode::ConfigError, "sweep needs a 'base' scenario or --scenario");

  if (!j.contains("parameter") || !j.at("parameter").is_string())
    throw Error(ErrorCode::ConfigError, "field 'parameter' must be a string");
  spec.parameter = j.at("parameter").get<std::string>();

  if (!j.contains("values") || !j.at("values").is_array()) throw Error(ErrorCode::ConfigError, "field 'values' must be an array");
  for (const auto& v : j.at("values")) {
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, "field 'values' must hold numbers");
    spec.values.push_back(v.get<double>());
  }
  if (!j.contains("outputs") || !j.at("outputs").is_array())
    throw Error(ErrorCode::ConfigError, "field 'outputs' must be an array");
  for (const auto& v : j.at("outputs")) {
    if (!v.is_string()) throw Error(ErrorCode::ConfigError, "field 'outputs' must hold strings");
    spec.outputs.push_back(v.get<std::string>());
  }
  if (j.contains("point")) {
    const auto& p = j.at("point");
    detail::reject_unknown_keys(p, {"ea", "r"}, "point");
    spec.point = Allocation{detail::number_field(p, "ea"), detail::number_field(p, "r")};
  }
  check_sweep_spec(spec);
  return spec;
}

inline SweepSpec load_sweep(const std::string& path, const std::optional<Scenario>& base = std::nullopt) {
  return sweep_from_json(detail::read_json_file(path), base);
}

}  // namespace cdrleak
