#pragma once

// One function per CLI command.  Every numeric result is emitted as
// {"value": ..., "tol": ...} with the tolerance it was validated under.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_config.hpp"
#include "spaceform.hpp"

namespace spaceform::cli {

struct CommandOutput {
  json results = json::object();
  json tolerances = json::object();
  std::optional<NodeTable> nodes;
  std::optional<NodeTable> trace;
};

inline json val(double v, double tol) { return json{{"value", v}, {"tol", tol}}; }

inline json val(const Eigen::VectorXd& v, double tol) {
  return json{{"value", std::vector<double>(v.data(), v.data() + v.size())}, {"tol", tol}};
}

inline json val(const std::vector<double>& v, double tol) { return json{{"value", v}, {"tol", tol}}; }

inline json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    std::vector<double> r;
    for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline json ranges_json(const std::vector<RangeStat>& rs, double tol) {
  json out = json::object();
  for (const auto& r : rs) out[r.name] = {{"min", val(r.min, tol)}, {"max", val(r.max, tol)}};
  return out;
}

/// Quadrature accuracy is not known a priori; records carry the on-model
/// tolerance for node values and the equality tolerance for comparisons.
inline constexpr double kQuadratureTol = 1e-8;

inline json standard_tolerances() {
  return {{"on_model", kOnModelTolerance},
          {"mean_curvature_floor", kMeanCurvatureFloor},
          {"equality", kEqualityTolerance},
          {"quadrature", kQuadratureTol},
          {"max_metric_condition", kMaxMetricCondition},
          {"normal_stencil_step", kNormalStencilStep},
          {"laplacian_step", kLaplacianStep},
          {"gradient_step", kGradientStep}};
}

inline json grid_json(const QuadratureGrid& g) {
  return {{"scheme", to_string(g.scheme)}, {"resolution", g.resolution}, {"nodes", g.size()}};
}

// ---------------------------------------------------------------------------

inline CommandOutput cmd_catalog_list(const json&) {
  CommandOutput out;
  json entries = json::array();
  for (const auto& info : catalog_list()) {
    json params = json::array();
    for (const auto& p : info.params) {
      json pj{{"name", p.name}, {"description", p.description}};
      pj["default"] = p.default_value ? json(*p.default_value) : json(nullptr);
      params.push_back(pj);
    }
    entries.push_back({{"name", info.name}, {"description", info.description}, {"params", params}});
  }
  entries.push_back({{"name", "inline"},
                     {"description", "user parametrization: ambient, dim, curvature, variables, chart, map"},
                     {"params", json::array()}});
  out.results["entries"] = entries;
  return out;
}

inline CommandOutput cmd_eval(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const Immersion& imm = loaded.immersion;
  const double c = imm.ambient().curvature();
  std::vector<ChartPoint> pts;
  if (cfg.contains("at")) {
    for (const auto& p : cfg["at"]) {
      const auto v = p.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != imm.domain_dim()) throw ConfigError("each 'at' point needs n coordinates");
      pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  } else {
    std::mt19937_64 rng(get<unsigned long long>(cfg, "seed", 0));
    const int count = get<int>(cfg, "points", 5);
    for (int i = 0; i < count; ++i) pts.push_back(imm.chart().sample(rng));
  }
  json points = json::array();
  for (const auto& x : pts) {
    const ShapeData sd = shape_data(imm, x);
    json pj;
    pj["x"] = std::vector<double>(x.data(), x.data() + x.size());
    pj["position"] = val(sd.position, kOnModelTolerance);
    pj["metric"] = matrix_json(sd.metric);
    pj["h"] = val(sd.mean_curvature, kOnModelTolerance);
    pj["alpha_sq"] = val(sd.alpha_sq, kOnModelTolerance);
    pj["scalar_curvature"] = val(scalar_curvature(sd, c), kOnModelTolerance);
    pj["ricci"] = matrix_json(ricci(sd, c));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sd.h_coeffs[0]);
    pj["principal_curvatures_nu1"] = val(Eigen::VectorXd(eig.eigenvalues()), kOnModelTolerance);
    pj["minimal"] = sd.minimal();
    pj["normal_conn_sq"] = sd.normal_conn_sq ? val(*sd.normal_conn_sq, kOnModelTolerance) : json(nullptr);
    try {
      pj["gauss_defect"] = val(gauss_check(imm, x), 1e-6);
    } catch (const NumericalError&) {
      pj["gauss_defect"] = nullptr;
    }
    points.push_back(pj);
  }
  out.results["points"] = points;
  if (loaded.entry) {
    const ValidationReport rep = validate_entry(*loaded.entry);
    out.results["validation"] = {{"points", rep.points}, {"max_defect", val(rep.max_defect, 1e-7)}, {"passed", rep.passed}};
  }
  out.tolerances = standard_tolerances();
  return out;
}

inline CommandOutput cmd_functional(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const Immersion& imm = loaded.immersion;
  const QuadratureGrid grid = load_grid(cfg, imm);
  const NodeData nodes = evaluate_nodes(imm, grid);
  const double c = imm.ambient().curvature();
  std::vector<Functional> which{Functional::Pi, Functional::Psi, Functional::Theta};
  if (cfg.contains("functional")) which = {parse_functional(cfg["functional"].get<std::string>())};
  out.results["grid"] = grid_json(grid);
  out.results["volume"] = val(nodes.total_measure(), kQuadratureTol);
  for (auto f : which) out.results[to_string(f)] = val(functional_value(nodes, f, c), kQuadratureTol);
  if (loaded.entry && loaded.entry->known.volume) out.results["known_volume"] = *loaded.entry->known.volume;
  NodeTable t;
  t.columns = {"node"};
  for (int i = 0; i < imm.domain_dim(); ++i) t.columns.push_back("x" + std::to_string(i));
  t.columns.insert(t.columns.end(), {"h", "alpha_sq", "weight"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row{double(k)};
    for (int i = 0; i < imm.domain_dim(); ++i) row.push_back(grid.nodes[k][i]);
    row.insert(row.end(), {nodes.shape[k].mean_curvature, nodes.shape[k].alpha_sq, nodes.measure[k]});
    t.rows.push_back(std::move(row));
  }
  out.nodes = std::move(t);
  out.tolerances = standard_tolerances();
  return out;
}

inline CommandOutput cmd_residual(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  const Functional f = parse_functional(cfg["functional"].get<std::string>());
  ResidualReport rep = el_residual(loaded.immersion, grid, f);
  out.results["grid"] = grid_json(grid);
  out.results["functional"] = to_string(f);
  out.results["sup_residual"] = val(rep.sup_residual, 1e-5);
  out.results["l2_residual"] = val(rep.l2_residual, 1e-5);
  out.results["per_equation"] = val(rep.per_equation, 1e-5);
  out.results["minimal_flag"] = rep.minimal_flag;
  out.results["gap_stats"] = ranges_json(rep.gap_stats, kOnModelTolerance);
  out.nodes = std::move(rep.nodes);
  out.tolerances = standard_tolerances();
  return out;
}

inline json gap_json(const GapStats& g) {
  json r;
  r["estimate"] = g.estimate;
  r["expressions"] = ranges_json(g.expressions, kEqualityTolerance);
  r["upper_bound"] = val(g.upper_bound, 0.0);
  r["upper_holds"] = g.upper_holds;
  r["upper_equality"] = g.upper_equality;
  r["violating_nodes"] = g.violating_nodes;
  r["violation_mass"] = val(g.violation_mass, kQuadratureTol);
  r["lambda"] = g.lambda ? val(*g.lambda, kEqualityTolerance) : json(nullptr);
  if (g.middle_chain_holds) r["middle_chain_holds"] = *g.middle_chain_holds;
  if (g.middle_chain_failures) r["middle_chain_failures"] = *g.middle_chain_failures;
  if (g.lemma_objective_max) r["lemma_objective_max"] = val(*g.lemma_objective_max, kEqualityTolerance);
  r["minimal"] = g.minimal;
  return r;
}

inline json hyperbolic_json(const HyperbolicReport& rep) {
  json r;
  r["theorem"] = rep.theorem == HyperbolicTheorem::Thm15 ? "thm15" : "thm16";
  r["branch"] = to_string(rep.branch);
  r["expression"] = {{"min", val(rep.expression.min, kEqualityTolerance)}, {"max", val(rep.expression.max, kEqualityTolerance)}};
  r["margin"] = val(rep.margin, kEqualityTolerance);
  r["violating_nodes"] = rep.violating_nodes;
  r["equality_defect"] = val(rep.equality_defect, kEqualityTolerance);
  r["a_nuH_defect"] = val(rep.a_nuH_defect, kEqualityTolerance);
  r["conn_sq_max"] = val(rep.conn_sq_max, kEqualityTolerance);
  r["minimal"] = rep.minimal;
  r["patch_only"] = rep.patch_only;
  return r;
}

inline HyperbolicTheorem parse_theorem(const std::string& s) {
  if (s == "thm15") return HyperbolicTheorem::Thm15;
  if (s == "thm16") return HyperbolicTheorem::Thm16;
  throw ConfigError("unknown hyperbolic estimate '" + s + "' (expected thm15 or thm16)");
}

inline CommandOutput cmd_hyperbolic(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  const auto which = parse_theorem(get<std::string>(cfg, "estimate", "thm15"));
  HyperbolicReport rep = hyperbolic_gap_check(loaded.immersion, grid, which, get<double>(cfg, "tol", kEqualityTolerance));
  out.results = hyperbolic_json(rep);
  out.results["grid"] = grid_json(grid);
  out.nodes = std::move(rep.nodes);
  out.tolerances = standard_tolerances();
  return out;
}

inline CommandOutput cmd_gap(const json& cfg) {
  const std::string est = cfg["estimate"].get<std::string>();
  if (est == "thm15" || est == "thm16") return cmd_hyperbolic(cfg);
  if (est != "es" && est != "es2") throw ConfigError("unknown estimate '" + est + "' (expected es, es2, thm15 or thm16)");
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  GapStats g = est == "es" ? gap_scan_es(loaded.immersion, grid) : gap_scan_es2(loaded.immersion, grid);
  out.results = gap_json(g);
  out.results["grid"] = grid_json(grid);
  out.nodes = std::move(g.nodes);
  out.tolerances = standard_tolerances();
  return out;
}

inline CommandOutput cmd_simons(const json& cfg) {
  CommandOutput out;
  const int samples = get<int>(cfg, "samples", 1000);
  const int max_n = get<int>(cfg, "max_n", 5), max_p = get<int>(cfg, "max_p", 5);
  if (samples < 0 || max_n < 1 || max_p < 1) throw ConfigError("simons needs samples >= 0, max_n >= 1, max_p >= 1");
  std::mt19937_64 rng(get<unsigned long long>(cfg, "seed", 0));
  std::uniform_int_distribution<int> dn(1, max_n), dp(1, max_p);
  constexpr double tol = 1e-9;
  double worst = 0.0;
  std::size_t violations = 0;
  for (int i = 0; i < samples; ++i) {
    const int n = dn(rng), p = dp(rng);
    const ShapeTuple t = random_tuple(rng, n, p);
    const double q = simons_quadratic(t), b = simons_bound(t);
    if (b <= 0) continue;
    worst = std::max(worst, q / b);
    if (q > b * (1.0 + tol)) ++violations;
  }
  out.results["samples"] = samples;
  out.results["max_ratio"] = val(worst, tol);
  out.results["violations"] = violations;
  json cliff = json::array();
  for (int n = 2; n <= std::max(2, max_n); ++n)
    for (int m = 1; m < n; ++m) {
      const ShapeTuple t = clifford_tuple(m, n);
      const double a = t.alpha_sq();
      cliff.push_back({{"m", m}, {"n", n}, {"ratio", val(simons_quadratic(t) / (a * a), tol)}, {"bound", 2.0 - 1.0 / t.p}});
    }
  out.results["clifford"] = cliff;
  out.tolerances = {{"relative", tol}};
  return out;
}

inline CommandOutput cmd_lemma11(const json& cfg) {
  CommandOutput out;
  const int n = require<int>(cfg, "n"), p = require<int>(cfg, "p");
  const double h = require<double>(cfg, "h");
  const int trials = get<int>(cfg, "trials", 64), steps = get<int>(cfg, "steps", 4000);
  const auto seed = get<unsigned>(cfg, "seed", 0);
  const Lemma11Result r = lemma11_maximize(n, p, h, trials, steps, seed);
  const auto& d = r.diagnostics;
  out.results["value"] = val(r.value, 1e-8);
  out.results["bound"] = val(1.5 * h, 0.0);
  out.results["within_bound"] = r.value <= 1.5 * h + 1e-8;
  out.results["converged"] = r.converged;
  out.results["gradient_norm"] = val(r.gradient_norm, 1e-8);
  out.results["best_trial"] = r.best_trial;
  out.results["identity"] = {{"lhs", val(d.numerator, 1e-6)},
                             {"rhs", val(d.identity_rhs, 1e-6)},
                             {"relative_defect", val(d.identity_defect, 1e-6)},
                             {"holds", d.identity_defect <= 1e-6}};
  out.results["multipliers"] = {{"first", val(d.lambda_first, 1e-6)},
                                {"second", val(d.lambda_second, 1e-6)},
                                {"relative_defect", val(d.multiplier_defect, 1e-6)}};
  out.results["alpha_sq_minus_a1_sq"] = val(d.off_a1, 1e-6);
  json mats = json::array();
  for (const auto& A : r.tuple.A) mats.push_back(matrix_json(A));
  out.results["maximizer"] = mats;
  if (const int samples = get<int>(cfg, "samples", 0); samples > 0) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull);
    double best = -1e300;
    for (int i = 0; i < samples; ++i) best = std::max(best, lemma11_objective(lemma11_random_feasible(rng, n, p, h)));
    out.results["random_search"] = {{"samples", samples}, {"best", val(best, 1e-6)}, {"exceeds_optimizer", best > r.value + 1e-6}};
  }
  out.tolerances = {{"bound", 1e-8}, {"identity_relative", 1e-6}, {"equality_case", 1e-6}, {"random_search", 1e-6}};
  return out;
}

inline DeformationFamily load_family(const json& cfg, const Immersion& imm) {
  return DeformationFamily(imm, get<int>(cfg, "modes", kDefaultModes));
}

inline Eigen::VectorXd vector_field(const json& cfg, const std::string& key, int K) {
  const auto v = require<std::vector<double>>(cfg, key);
  if (static_cast<int>(v.size()) != K) throw ConfigError("field '" + key + "' needs " + std::to_string(K) + " entries");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), K);
}

inline CommandOutput cmd_flow(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  const Functional f = parse_functional(cfg["functional"].get<std::string>());
  const DeformationFamily fam = load_family(cfg, loaded.immersion);
  Eigen::VectorXd init = Eigen::VectorXd::Zero(fam.size());
  if (cfg.contains("init")) {
    init = vector_field(cfg, "init", fam.size());
  } else if (cfg.contains("perturb")) {
    std::mt19937_64 rng(get<unsigned long long>(cfg, "seed", 0));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double amp = get<double>(cfg, "perturb", 0.0);
    for (int k = 0; k < fam.size(); ++k) init[k] = amp * u(rng);
  }
  DescentOptions opt;
  opt.budget = get<int>(cfg, "budget", 50);
  opt.tol = get<double>(cfg, "tol", 1e-8);
  const DescentResult r = descend(fam, init, grid, f, opt);
  out.results["grid"] = grid_json(grid);
  out.results["functional"] = to_string(f);
  out.results["modes"] = fam.size();
  out.results["initial_coeffs"] = val(init, 0.0);
  out.results["coeffs"] = val(r.coeffs, opt.tol);
  out.results["initial_energy"] = val(r.trace.empty() ? r.energy : r.trace.front().energy, kQuadratureTol);
  out.results["energy"] = val(r.energy, kQuadratureTol);
  out.results["converged"] = r.converged;
  out.results["halted"] = r.halted ? json(*r.halted) : json(nullptr);
  NodeTable trace;
  trace.columns = {"iteration", "energy", "grad_norm", "step"};
  json tj = json::array();
  for (const auto& s : r.trace) {
    trace.rows.push_back({double(s.iteration), s.energy, s.grad_norm, s.step});
    tj.push_back({{"iteration", s.iteration}, {"energy", s.energy}, {"grad_norm", s.grad_norm}, {"step", s.step}});
  }
  out.results["trace"] = tj;
  out.trace = std::move(trace);
  out.tolerances = standard_tolerances();
  out.tolerances["descent_tol"] = opt.tol;
  return out;
}

inline CommandOutput cmd_variation(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  const Functional f = parse_functional(cfg["functional"].get<std::string>());
  const DeformationFamily fam = load_family(cfg, loaded.immersion);
  Eigen::VectorXd dir;
  if (cfg.contains("direction")) {
    dir = vector_field(cfg, "direction", fam.size());
  } else {
    const int mode = get<int>(cfg, "mode", 0);
    if (mode < 0 || mode >= fam.size()) throw ConfigError("field 'mode' out of range");
    dir = Eigen::VectorXd::Unit(fam.size(), mode);
  }
  const FirstVariation v = first_variation_check(fam, grid, f, dir);
  out.results["grid"] = grid_json(grid);
  out.results["functional"] = to_string(f);
  out.results["direction"] = val(dir, 0.0);
  out.results["fd_derivative"] = val(v.fd_derivative, 0.02);
  out.results["residual_pairing"] = val(v.residual_pairing, 0.02);
  out.results["defect"] = val(v.defect, 0.02);
  out.results["richardson"] = v.richardson;
  out.tolerances = standard_tolerances();
  out.tolerances["relative_defect"] = 0.02;
  return out;
}

inline CommandOutput cmd_scalar_identity(const json& cfg) {
  CommandOutput out;
  const auto loaded = load_immersion(cfg["immersion"]);
  const QuadratureGrid grid = load_grid(cfg, loaded.immersion);
  const ScalarIdentity s = total_scalar_identity(loaded.immersion, grid);
  out.results["grid"] = grid_json(grid);
  out.results["integral_scalar"] = val(s.lhs, 1e-6);
  out.results["theta_minus_pi"] = val(s.rhs, 1e-6);
  out.results["Theta"] = val(s.theta, kQuadratureTol);
  out.results["Pi"] = val(s.pi, kQuadratureTol);
  out.results["defect"] = val(s.defect, 1e-6);
  out.results["relative_defect"] = val(s.relative_defect, 1e-6);
  out.tolerances = standard_tolerances();
  out.tolerances["relative_defect"] = 1e-6;
  return out;
}

inline CommandOutput run_command(const json& cfg) {
  const std::string cmd = cfg["command"];
  if (cmd == "catalog-list") return cmd_catalog_list(cfg);
  if (cmd == "eval") return cmd_eval(cfg);
  if (cmd == "functional") return cmd_functional(cfg);
  if (cmd == "residual") return cmd_residual(cfg);
  if (cmd == "gap") return cmd_gap(cfg);
  if (cmd == "hyperbolic") return cmd_hyperbolic(cfg);
  if (cmd == "simons") return cmd_simons(cfg);
  if (cmd == "lemma11") return cmd_lemma11(cfg);
  if (cmd == "flow") return cmd_flow(cfg);
  if (cmd == "variation-check") return cmd_variation(cfg);
  if (cmd == "scalar-identity") return cmd_scalar_identity(cfg);
  throw ConfigError("unknown command '" + cmd + "'");
}

}  // namespace spaceform::cli
