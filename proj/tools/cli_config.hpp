#pragma once

// Run configuration: JSON config merged under explicit flags, strict key
// checking per command, immersion and grid construction.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spaceform.hpp"

namespace spaceform::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"catalog-list", "eval",   "functional", "residual",
                                              "gap",          "hyperbolic", "simons", "lemma11",
                                              "flow",         "variation-check", "scalar-identity"};
  return names;
}

struct CommandSchema {
  std::set<std::string> required;
  std::set<std::string> optional;
};

inline const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys{"command", "seed", "output", "dump_nodes", "threads", "timing"};
  return keys;
}

inline CommandSchema schema_for(const std::string& cmd) {
  static const std::map<std::string, CommandSchema> table{
      {"catalog-list", {{}, {}}},
      {"eval", {{"immersion"}, {"points", "at"}}},
      {"functional", {{"immersion"}, {"grid", "functional"}}},
      {"residual", {{"immersion", "functional"}, {"grid"}}},
      {"gap", {{"immersion", "estimate"}, {"grid"}}},
      {"hyperbolic", {{"immersion"}, {"grid", "estimate", "tol"}}},
      {"simons", {{}, {"samples", "max_n", "max_p"}}},
      {"lemma11", {{"n", "p", "h"}, {"trials", "steps", "samples"}}},
      {"flow", {{"immersion", "functional"}, {"grid", "modes", "init", "perturb", "budget", "tol"}}},
      {"variation-check", {{"immersion", "functional"}, {"grid", "modes", "direction", "mode"}}},
      {"scalar-identity", {{"immersion"}, {"grid"}}},
  };
  auto it = table.find(cmd);
  if (it == table.end()) throw ConfigError("unknown command '" + cmd + "'");
  return it->second;
}

/// Rejects unknown keys and missing required keys before any computation.
inline void validate_config(const json& cfg) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (!cfg.contains("command") || !cfg["command"].is_string()) throw ConfigError("missing field 'command'");
  const std::string cmd = cfg["command"];
  const CommandSchema s = schema_for(cmd);
  for (const auto& [key, value] : cfg.items()) {
    if (common_keys().count(key) || s.required.count(key) || s.optional.count(key)) continue;
    throw ConfigError("unknown field '" + key + "' for command " + cmd);
  }
  for (const auto& key : s.required)
    if (!cfg.contains(key)) throw ConfigError("missing field '" + key + "' for command " + cmd);
  if (cfg.contains("grid")) {
    const auto& g = cfg["grid"];
    if (!g.is_object()) throw ConfigError("field 'grid' must be an object");
    for (const auto& [key, value] : g.items())
      if (key != "scheme" && key != "resolution") throw ConfigError("unknown field 'grid." + key + "'");
  }
  if (cmd == "flow" && cfg.contains("init") && cfg.contains("perturb"))
    throw ConfigError("fields 'init' and 'perturb' are exclusive");
  if (cmd == "variation-check" && cfg.contains("direction") && cfg.contains("mode"))
    throw ConfigError("fields 'direction' and 'mode' are exclusive");
}

inline json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
}

template <class T>
T get(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type");
  }
}

template <class T>
T require(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ConfigError("missing field '" + key + "'");
  return get<T>(cfg, key, T{});
}

// ---------------------------------------------------------------------------
// Immersions

struct LoadedImmersion {
  Immersion immersion;
  std::optional<CatalogEntry> entry;
};

inline Model parse_model(const std::string& s) {
  if (s == "sphere") return Model::SphereInFlat;
  if (s == "hyperbolic" || s == "hyperboloid") return Model::HyperboloidInMinkowski;
  if (s == "euclidean") return Model::Euclidean;
  throw ConfigError("unknown ambient model '" + s + "'");
}

inline InlineSpec parse_inline(const json& j) {
  static const std::set<std::string> keys{"type",      "name",       "ambient",  "dim",        "curvature",
                                          "variables", "chart",      "map",      "constants",  "retract",
                                          "constant_h", "cover_factor"};
  for (const auto& [key, value] : j.items())
    if (!keys.count(key)) throw ConfigError("unknown field 'immersion." + key + "'");
  InlineSpec s;
  s.name = get<std::string>(j, "name", "inline");
  s.model = parse_model(get<std::string>(j, "ambient", "sphere"));
  s.ambient_dim = require<int>(j, "dim");
  s.curvature = get<double>(j, "curvature", s.model == Model::HyperboloidInMinkowski ? -1.0 : 1.0);
  s.variables = require<std::vector<std::string>>(j, "variables");
  if (!j.contains("chart") || !j["chart"].is_array()) throw ConfigError("inline immersion needs a 'chart' array");
  for (const auto& a : j["chart"]) {
    for (const auto& [key, value] : a.items())
      if (key != "lo" && key != "hi" && key != "periodic" && key != "resolution")
        throw ConfigError("unknown field 'chart." + key + "'");
    ChartAxis ax;
    ax.lo = require<double>(a, "lo");
    ax.hi = require<double>(a, "hi");
    ax.periodic = get<bool>(a, "periodic", false);
    ax.default_resolution = get<int>(a, "resolution", ax.periodic ? 64 : 32);
    if (!(ax.hi > ax.lo)) throw ConfigError("chart axis needs hi > lo");
    s.axes.push_back(ax);
  }
  s.components = require<std::vector<std::string>>(j, "map");
  s.constants = get<std::map<std::string, double>>(j, "constants", {});
  s.retract = get<bool>(j, "retract", false);
  s.constant_h = get<bool>(j, "constant_h", false);
  s.cover_factor = get<double>(j, "cover_factor", 1.0);
  return s;
}

inline LoadedImmersion load_immersion(const json& j) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    if (!text.empty() && text.front() == '{') {
      json parsed;
      try {
        parsed = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("immersion is not valid JSON: ") + e.what());
      }
      return load_immersion(parsed);
    }
    CatalogEntry e = load_catalog_entry(parse_catalog_spec(text));
    Immersion imm = e.immersion;
    return {imm, std::move(e)};
  }
  if (!j.is_object() || !j.contains("type")) throw ConfigError("immersion must be a spec string or an object with 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "inline") return {inline_immersion(parse_inline(j)), std::nullopt};
  CatalogSpec spec{type, {}};
  for (const auto& [key, value] : j.items()) {
    if (key == "type") continue;
    if (!value.is_number()) throw ConfigError("catalog parameter '" + key + "' must be a number");
    spec.params[key] = value.get<double>();
  }
  CatalogEntry e = load_catalog_entry(spec);
  Immersion imm = e.immersion;
  return {imm, std::move(e)};
}

inline QuadratureGrid load_grid(const json& cfg, const Immersion& imm) {
  std::optional<GridScheme> scheme;
  std::vector<int> resolution;
  if (cfg.contains("grid")) {
    const auto& g = cfg["grid"];
    if (g.contains("scheme")) scheme = parse_grid_scheme(get<std::string>(g, "scheme", ""));
    if (g.contains("resolution")) {
      if (g["resolution"].is_number_integer())
        resolution = {g["resolution"].get<int>()};
      else
        resolution = get<std::vector<int>>(g, "resolution", {});
    }
  }
  return make_grid(imm, scheme, resolution);
}

}  // namespace spaceform::cli
