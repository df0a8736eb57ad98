// spaceform command-line front end.
//
//   spaceform <command> [flags]             flags override --config values
//   spaceform --config run.json [flags]
//
// Exit status: 0 success, 1 configuration error, 2 numerical-contract
// violation.  SPACEFORM_OUTPUT_DIR sets the default output directory.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_commands.hpp"

namespace fs = std::filesystem;
using spaceform::ConfigError;
using spaceform::NumericalError;
using spaceform::cli::json;

namespace {

void write_csv(const fs::path& path, const spaceform::NodeTable& t) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n" << std::setprecision(17);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

int fail(int code, const std::string& kind, const std::string& msg) {
  json err{{"error", msg}, {"kind", kind}, {"exit_status", code}};
  std::cerr << err.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Submanifold geometry in space forms: curvature functionals, gap scans, pinching checks"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(spaceform::kVersion));

  std::string command, config_path;
  app.add_option("command", command, "catalog-list | eval | functional | residual | gap | hyperbolic | simons | "
                                     "lemma11 | flow | variation-check | scalar-identity");
  app.add_option("--config", config_path, "JSON run configuration (explicit flags take precedence)");

  std::string immersion, scheme, functional, estimate, output;
  std::vector<int> resolution;
  unsigned long long seed = 0;
  int threads = 0, points = 0, n = 0, p = 0, trials = 0, steps = 0, samples = 0, max_n = 0, max_p = 0, modes = 0,
      budget = 0, mode = 0;
  double h = 0, tol = 0, perturb = 0;
  std::vector<double> init, direction;
  bool dump_nodes = false, timing = false;

  app.add_option("--immersion", immersion, "catalog spec like clifford(m=1,n=2), or inline JSON");
  app.add_option("--grid-scheme", scheme, "trapezoid | gauss-legendre | product-sphere");
  app.add_option("--resolution", resolution, "nodes per axis (one value applies to all axes)");
  app.add_option("--functional", functional, "Pi | Psi | Theta");
  app.add_option("--estimate", estimate, "es | es2 | thm15 | thm16");
  app.add_option("--seed", seed, "seed for sampling");
  app.add_option("--output", output, "output JSON path");
  app.add_flag("--dump-nodes", dump_nodes, "write per-node CSV next to the JSON record");
  app.add_option("--threads", threads, "worker cap (0 = hardware)");
  app.add_flag("--timing", timing, "include wall time in the record");
  app.add_option("--points", points, "eval: number of random chart points");
  app.add_option("--n", n, "lemma11: dimension");
  app.add_option("--p", p, "lemma11: codimension");
  app.add_option("--h", h, "lemma11: mean curvature");
  app.add_option("--trials", trials, "lemma11: multi-start count");
  app.add_option("--steps", steps, "lemma11: ascent steps per start");
  app.add_option("--samples", samples, "simons / lemma11: random samples");
  app.add_option("--max-n", max_n, "simons: largest n");
  app.add_option("--max-p", max_p, "simons: largest p");
  app.add_option("--modes", modes, "flow: basis size K");
  app.add_option("--budget", budget, "flow: iteration budget");
  app.add_option("--tol", tol, "flow: gradient tolerance; hyperbolic: equality tolerance");
  app.add_option("--perturb", perturb, "flow: random initial amplitude");
  app.add_option("--init", init, "flow: initial coefficients");
  app.add_option("--direction", direction, "variation-check: coefficient direction");
  app.add_option("--mode", mode, "variation-check: single basis mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  json cfg;
  try {
    cfg = config_path.empty() ? json::object() : spaceform::cli::read_config_file(config_path);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    auto set = [&](const char* flag, const std::string& key, const json& v) {
      if (app.count(flag)) cfg[key] = v;
    };
    if (!command.empty()) cfg["command"] = command;
    set("--immersion", "immersion", immersion);
    if (app.count("--grid-scheme")) cfg["grid"]["scheme"] = scheme;
    if (app.count("--resolution")) cfg["grid"]["resolution"] = resolution;
    set("--functional", "functional", functional);
    set("--estimate", "estimate", estimate);
    set("--seed", "seed", seed);
    set("--output", "output", output);
    if (dump_nodes) cfg["dump_nodes"] = true;
    set("--threads", "threads", threads);
    if (timing) cfg["timing"] = true;
    set("--points", "points", points);
    set("--n", "n", n);
    set("--p", "p", p);
    set("--h", "h", h);
    set("--trials", "trials", trials);
    set("--steps", "steps", steps);
    set("--samples", "samples", samples);
    set("--max-n", "max_n", max_n);
    set("--max-p", "max_p", max_p);
    set("--modes", "modes", modes);
    set("--budget", "budget", budget);
    set("--tol", "tol", tol);
    set("--perturb", "perturb", perturb);
    set("--init", "init", init);
    set("--direction", "direction", direction);
    set("--mode", "mode", mode);
    spaceform::cli::validate_config(cfg);
  } catch (const ConfigError& e) {
    return fail(1, "config", e.what());
  }

  const bool want_timing = spaceform::cli::get<bool>(cfg, "timing", false);
  const auto t0 = std::chrono::steady_clock::now();
  spaceform::cli::CommandOutput result;
  try {
    spaceform::set_thread_count(spaceform::cli::get<int>(cfg, "threads", 0));
    result = spaceform::cli::run_command(cfg);
  } catch (const ConfigError& e) {
    return fail(1, "config", e.what());
  } catch (const NumericalError& e) {
    return fail(2, "numerical", e.what());
  } catch (const json::exception& e) {
    return fail(1, "config", e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json record;
  record["command"] = cfg["command"];
  // The worker cap never changes results, so it stays out of the record.
  json inputs = cfg;
  inputs.erase("threads");
  record["inputs"] = inputs;
  record["version"] = spaceform::kVersion;
  record["results"] = result.results;
  record["tolerances"] = result.tolerances;
  if (want_timing) record["wall_time_s"] = wall;

  try {
    fs::path out_path;
    if (cfg.contains("output")) {
      out_path = cfg["output"].get<std::string>();
    } else if (const char* dir = std::getenv("SPACEFORM_OUTPUT_DIR"); dir && *dir) {
      out_path = fs::path(dir) / (cfg["command"].get<std::string>() + ".json");
    }
    const std::string text = record.dump(2) + "\n";
    fs::path stem_base = out_path.empty() ? fs::path(cfg["command"].get<std::string>()) : out_path;
    stem_base.replace_extension();
    if (out_path.empty()) {
      std::cout << text;
    } else {
      if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + out_path.string());
      f << text;
    }
    const bool dump = spaceform::cli::get<bool>(cfg, "dump_nodes", false);
    if (dump) {
      if (!result.nodes) throw ConfigError("command " + cfg["command"].get<std::string>() + " has no node table");
      write_csv(stem_base.string() + ".nodes.csv", *result.nodes);
    }
    if (result.trace && (dump || !out_path.empty())) write_csv(stem_base.string() + ".trace.csv", *result.trace);
  } catch (const ConfigError& e) {
    return fail(1, "config", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(1, "config", e.what());
  }
  return 0;
}
