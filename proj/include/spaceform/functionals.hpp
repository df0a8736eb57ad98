#pragma once

// Integral functionals Π = ∫‖α‖², Ψ = ∫‖H‖², Θ_c = ∫(n(n−1)c + ‖H‖²), their
// pointwise Euler–Lagrange residuals, and node-wise scans of the pinching
// estimates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/error.hpp"
#include "spaceform/immersion.hpp"
#include "spaceform/intrinsic.hpp"
#include "spaceform/parallel.hpp"
#include "spaceform/quadrature.hpp"
#include "spaceform/shape.hpp"

namespace spaceform {

enum class Functional { Pi, Psi, Theta };

inline std::string to_string(Functional f) {
  switch (f) {
    case Functional::Pi:
      return "Pi";
    case Functional::Psi:
      return "Psi";
    case Functional::Theta:
      return "Theta";
  }
  return "?";
}

inline Functional parse_functional(const std::string& s) {
  if (s == "Pi" || s == "pi") return Functional::Pi;
  if (s == "Psi" || s == "psi") return Functional::Psi;
  if (s == "Theta" || s == "theta" || s == "Theta_c") return Functional::Theta;
  throw ConfigError("unknown functional '" + s + "' (expected Pi, Psi or Theta)");
}

/// Column-named per-node values, written as CSV by the CLI.
struct NodeTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shape data and Riemannian weight (chart weight × √det g × cover factor)
/// at every grid node.
struct NodeData {
  std::vector<ShapeData> shape;
  std::vector<double> measure;

  double total_measure() const { return pairwise_sum(measure); }

  template <class F>
  double integrate(F&& f) const {
    std::vector<double> terms(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) terms[k] = measure[k] * f(shape[k], k);
    return pairwise_sum(terms);
  }
};

inline NodeData evaluate_nodes(const Immersion& imm, const QuadratureGrid& grid) {
  NodeData d;
  d.shape.resize(grid.size());
  d.measure.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    d.shape[k] = local_shape(imm, grid.nodes[k]);
    d.measure[k] = grid.weights[k] * d.shape[k].volume_density * imm.cover_factor();
  });
  return d;
}

/// ‖H‖² = Σ_r (trace h^r)², independent of the normal frame.
inline double mean_curvature_sq(const ShapeData& sd) {
  double s = 0.0;
  for (const auto& A : sd.h_coeffs) s += A.trace() * A.trace();
  return s;
}

inline double functional_integrand(const ShapeData& sd, Functional which, double c) {
  const int n = sd.n();
  switch (which) {
    case Functional::Pi:
      return sd.alpha_sq;
    case Functional::Psi:
      return mean_curvature_sq(sd);
    case Functional::Theta:
      return n * (n - 1) * c + mean_curvature_sq(sd);
  }
  return 0.0;
}

inline double functional_value(const NodeData& nodes, Functional which, double c) {
  return nodes.integrate([&](const ShapeData& sd, std::size_t) { return functional_integrand(sd, which, c); });
}

inline double functional_value(const Immersion& imm, const QuadratureGrid& grid, Functional which) {
  return functional_value(evaluate_nodes(imm, grid), which, imm.ambient().curvature());
}

inline double volume(const Immersion& imm, const QuadratureGrid& grid) {
  return evaluate_nodes(imm, grid).total_measure();
}

// ---------------------------------------------------------------------------
// Euler–Lagrange residuals

/// Signed left-minus-right defects of the critical-point equations at one
/// node, in the node's normal frame: eq[0] is the primary equation, eq[m]
/// the m-th normal equation.  In the minimal regime eq[r] = 2 trace(A_r ΣA_k²)
/// for Π and 0 for Ψ, Θ.
struct ELPoint {
  Eigen::VectorXd eq;
  double primary = 0.0;
  double residual = 0.0;
  /// Σ_r eq[r] ν_r as a flat vector; pairs with a variation field.
  Eigen::VectorXd vector;
};

struct ELOptions {
  /// Treat the mean curvature as constant (Δh = 0, ∇h = 0); defaults to the
  /// immersion's own flag.
  std::optional<bool> constant_h;
  double laplacian_step = kLaplacianStep;
};

namespace el_detail {

inline Eigen::MatrixXd sum_squares(const ShapeData& sd) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sd.n(), sd.n());
  for (const auto& A : sd.h_coeffs) S += A * A;
  return S;
}

/// ∂_j ν₁ at y (chart directions), ν₁ = H/‖H‖.
inline std::vector<Eigen::VectorXd> nu1_derivatives(const Immersion& imm, const ChartPoint& y) {
  const ShapeData sy = local_shape(imm, y);
  if (!sy.h_adapted) throw NumericalError("mean curvature vanishes at x = " + format_point(y));
  const auto d = normal_frame_derivatives(imm, sy);
  std::vector<Eigen::VectorXd> out;
  for (const auto& di : d) out.push_back(di[0]);
  return out;
}

}  // namespace el_detail

inline ELPoint el_point(const Immersion& imm, const ShapeData& sd, Functional which, bool minimal_regime,
                        const ELOptions& opt = {}) {
  const int n = sd.n(), p = sd.p();
  const double c = imm.ambient().curvature();
  ELPoint out;
  out.eq = Eigen::VectorXd::Zero(p);
  const Eigen::MatrixXd S = el_detail::sum_squares(sd);

  if (minimal_regime) {
    if (which == Functional::Pi) {
      for (int r = 0; r < p; ++r) out.eq[r] = 2.0 * (sd.h_coeffs[static_cast<std::size_t>(r)] * S).trace();
      out.primary = out.eq.norm();
    }
  } else {
    if (!sd.h_adapted) throw NumericalError("frame degeneration; residual undefined at x = " + format_point(sd.point));
    const double h = sd.mean_curvature;
    const bool constant_h = opt.constant_h.value_or(imm.constant_mean_curvature());
    const auto& A1 = sd.h_coeffs[0];

    double lap_h = 0.0;
    Eigen::VectorXd dh = Eigen::VectorXd::Zero(n);  // e_a(h)
    if (!constant_h) {
      ScalarField hf = [&imm](const ChartPoint& y) { return local_shape(imm, y).mean_curvature; };
      lap_h = laplace_beltrami(imm, hf, sd.point, opt.laplacian_step);
      dh = sd.frame_coeffs * chart_gradient(imm.chart(), hf, sd.point, opt.laplacian_step);
    }

    std::vector<Eigen::MatrixXd> omega;
    double conn_sq = 0.0;
    if (p > 1) {
      omega = normal_connection_forms(imm, sd, normal_frame_derivatives(imm, sd));
      for (const auto& w : omega)
        for (int t = 1; t < p; ++t) conn_sq += w(0, t) * w(0, t);
    }

    // 2Δh with the nonnegative Laplacian Δ = −div grad.
    const double lhs = -2.0 * lap_h;
    double rhs = 0.0;
    switch (which) {
      case Functional::Pi:
        rhs = 2.0 * c * h - 2.0 * h * conn_sq - h * sd.alpha_sq + 2.0 * (A1 * S).trace();
        break;
      case Functional::Psi:
        rhs = 2.0 * c * n * h - 2.0 * h * conn_sq - h * h * h + 2.0 * h * A1.squaredNorm();
        break;
      case Functional::Theta:
        rhs = (3.0 * n - double(n) * n) * c * h - 2.0 * h * conn_sq - h * h * h + 2.0 * h * A1.squaredNorm();
        break;
    }
    out.eq[0] = rhs - lhs;
    out.primary = std::abs(out.eq[0]);

    for (int m = 1; m < p; ++m) {
      double grad_term = 0.0, cross = 0.0;
      for (int a = 0; a < n; ++a) {
        const auto& w = omega[static_cast<std::size_t>(a)];
        grad_term += dh[a] * w(0, m);
        for (int s = 0; s < p; ++s) cross += w(0, s) * w(m, s);
      }
      // div X_m with X_m = Σ_a ⟨∇_{e_a}ν₁, ν_m⟩ e_a, ν_m carried along by
      // normal projection from the node.
      auto field = [&](const ChartPoint& y) -> Eigen::VectorXd {
        const auto frame = transported_normal_frame(imm, y, sd);
        const auto d1 = el_detail::nu1_derivatives(imm, y);
        Eigen::VectorXd cov(n);
        for (int j = 0; j < n; ++j) cov[j] = imm.ambient().flat_inner(d1[static_cast<std::size_t>(j)], frame[static_cast<std::size_t>(m)]);
        return induced_metric(imm, y).ldlt().solve(cov);
      };
      const double div = divergence(imm, field, sd.point, opt.laplacian_step);
      const auto& Am = sd.h_coeffs[static_cast<std::size_t>(m)];
      if (which == Functional::Pi)
        out.eq[m] = 2.0 * grad_term + h * div - h * cross + 2.0 * (Am * S).trace();
      else
        out.eq[m] = 4.0 * grad_term + 2.0 * h * div - 2.0 * h * cross + 2.0 * h * (A1 * Am).trace();
    }
  }
  out.residual = out.primary;
  for (int m = 1; m < p; ++m) out.residual = std::max(out.residual, std::abs(out.eq[m]));
  out.vector = Eigen::VectorXd::Zero(sd.position.size());
  for (int r = 0; r < p; ++r) out.vector += out.eq[r] * sd.nu(r);
  return out;
}

struct RangeStat {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

struct ResidualReport {
  Functional functional = Functional::Pi;
  double sup_residual = 0.0;
  double l2_residual = 0.0;
  /// Sup over nodes of |primary| followed by |eq_m|, m = 2..p.
  std::vector<double> per_equation;
  bool minimal_flag = false;
  std::vector<RangeStat> gap_stats;
  double total_measure = 0.0;
  NodeTable nodes;
};

inline RangeStat range_of(const std::string& name, const std::vector<double>& v) {
  RangeStat r{name, v.empty() ? 0.0 : v[0], v.empty() ? 0.0 : v[0]};
  for (double x : v) {
    r.min = std::min(r.min, x);
    r.max = std::max(r.max, x);
  }
  return r;
}

inline bool all_minimal(const NodeData& nodes) {
  for (const auto& sd : nodes.shape)
    if (sd.h_adapted) return false;
  return true;
}

/// Minimal everywhere → true; ν₁-adapted everywhere → false; mixed → error.
inline bool minimal_regime(const NodeData& nodes) {
  std::size_t minimal = 0;
  for (const auto& sd : nodes.shape) minimal += sd.h_adapted ? 0 : 1;
  if (minimal == nodes.shape.size()) return true;
  if (minimal == 0) return false;
  for (const auto& sd : nodes.shape)
    if (!sd.h_adapted) throw NumericalError("frame degeneration; residual undefined (h vanishes at x = " + format_point(sd.point) + ")");
  return false;
}

inline ResidualReport el_residual(const Immersion& imm, const QuadratureGrid& grid, Functional which,
                                  const ELOptions& opt = {}) {
  const NodeData nodes = evaluate_nodes(imm, grid);
  const bool minimal = minimal_regime(nodes);
  const int p = imm.codim();
  ResidualReport rep;
  rep.functional = which;
  rep.minimal_flag = minimal;
  rep.total_measure = nodes.total_measure();
  std::vector<ELPoint> pts(nodes.shape.size());
  if (!(minimal && which != Functional::Pi))
    parallel_for(nodes.shape.size(), [&](std::size_t k) { pts[k] = el_point(imm, nodes.shape[k], which, minimal, opt); });
  else
    for (auto& pt : pts) pt.eq = Eigen::VectorXd::Zero(p);

  rep.per_equation.assign(static_cast<std::size_t>(p), 0.0);
  std::vector<double> sq(pts.size()), hs, as;
  rep.nodes.columns = {"node"};
  for (int i = 0; i < imm.domain_dim(); ++i) rep.nodes.columns.push_back("x" + std::to_string(i));
  rep.nodes.columns.insert(rep.nodes.columns.end(), {"h", "alpha_sq", "weight", "residual", "primary"});
  for (int m = 1; m < p; ++m) rep.nodes.columns.push_back("eq" + std::to_string(m + 1));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& pt = pts[k];
    rep.sup_residual = std::max(rep.sup_residual, pt.residual);
    rep.per_equation[0] = std::max(rep.per_equation[0], pt.primary);
    for (int m = 1; m < p; ++m)
      rep.per_equation[static_cast<std::size_t>(m)] = std::max(rep.per_equation[static_cast<std::size_t>(m)], std::abs(pt.eq[m]));
    sq[k] = nodes.measure[k] * pt.residual * pt.residual;
    hs.push_back(nodes.shape[k].mean_curvature);
    as.push_back(nodes.shape[k].alpha_sq);
    std::vector<double> row{double(k)};
    for (int i = 0; i < imm.domain_dim(); ++i) row.push_back(grid.nodes[k][i]);
    row.insert(row.end(), {hs.back(), as.back(), nodes.measure[k], pt.residual, pt.primary});
    for (int m = 1; m < p; ++m) row.push_back(pt.eq[m]);
    rep.nodes.rows.push_back(std::move(row));
  }
  rep.l2_residual = std::sqrt(pairwise_sum(sq));
  rep.gap_stats = {range_of("h", hs), range_of("alpha_sq", as)};
  return rep;
}

inline ResidualReport el_residual_pi(const Immersion& imm, const QuadratureGrid& grid, const ELOptions& opt = {}) {
  return el_residual(imm, grid, Functional::Pi, opt);
}
inline ResidualReport el_residual_psi(const Immersion& imm, const QuadratureGrid& grid, const ELOptions& opt = {}) {
  return el_residual(imm, grid, Functional::Psi, opt);
}
inline ResidualReport el_residual_theta(const Immersion& imm, const QuadratureGrid& grid, const ELOptions& opt = {}) {
  return el_residual(imm, grid, Functional::Theta, opt);
}

// ---------------------------------------------------------------------------
// Gap scans

inline constexpr double kEqualityTolerance = 1e-9;

struct GapStats {
  std::string estimate;
  std::vector<RangeStat> expressions;
  double upper_bound = 0.0;
  bool upper_holds = true;
  /// max of the bounded expression equals the bound within 1e−9.
  bool upper_equality = false;
  std::size_t violating_nodes = 0;
  /// ∫ max(0, expression − bound) dμ.
  double violation_mass = 0.0;
  /// Smallest λ ≥ 0 making the lower bound hold; empty if no λ works.
  std::optional<double> lambda;
  /// es2 only: node-wise middle2 ≤ middle.
  std::optional<bool> middle_chain_holds;
  std::optional<std::size_t> middle_chain_failures;
  /// es2 only, minimal immersions: max over nodes of the Lemma objective.
  std::optional<double> lemma_objective_max;
  bool minimal = false;
  NodeTable nodes;
};

namespace gap_detail {

/// ‖∇^ν ν_H‖² at a node (0 in the minimal regime or for p = 1).
inline double conn_sq(const Immersion& imm, const ShapeData& sd) {
  if (!sd.h_adapted || sd.p() == 1) return 0.0;
  return normal_connection_sq(imm, sd);
}

inline double lemma_numerator(const ShapeData& sd) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sd.n(), sd.n());
  for (const auto& A : sd.h_coeffs) S += A * A;
  return (sd.h_coeffs[0] * S).trace();
}

/// Objective trace(A_ν ΣA_k²)/‖α‖² maximized over unit normals ν.
inline double lemma_objective_max_over_normals(const ShapeData& sd) {
  if (sd.alpha_sq == 0.0) return 0.0;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sd.n(), sd.n());
  for (const auto& A : sd.h_coeffs) S += A * A;
  Eigen::VectorXd v(sd.p());
  for (int r = 0; r < sd.p(); ++r) v[r] = (sd.h_coeffs[static_cast<std::size_t>(r)] * S).trace();
  return v.norm() / sd.alpha_sq;
}

inline void finish_upper(GapStats& g, const NodeData& nodes, const std::vector<double>& bounded) {
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> excess(bounded.size());
  for (std::size_t k = 0; k < bounded.size(); ++k) {
    mx = std::max(mx, bounded[k]);
    const double e = bounded[k] - g.upper_bound;
    if (e > kEqualityTolerance) ++g.violating_nodes;
    excess[k] = nodes.measure[k] * std::max(0.0, e);
  }
  g.violation_mass = pairwise_sum(excess);
  g.upper_holds = g.violating_nodes == 0;
  g.upper_equality = std::abs(mx - g.upper_bound) <= kEqualityTolerance;
}

/// Smallest λ ≥ 0 with −λh² − offset ≤ lower at every node.
inline std::optional<double> smallest_lambda(const NodeData& nodes, const std::vector<double>& lower, double offset) {
  double lambda = 0.0;
  for (std::size_t k = 0; k < lower.size(); ++k) {
    const double deficit = -offset - lower[k];
    if (deficit <= 0) continue;
    const double h2 = mean_curvature_sq(nodes.shape[k]);
    if (h2 <= kMeanCurvatureFloor * kMeanCurvatureFloor) return std::nullopt;
    lambda = std::max(lambda, deficit / h2);
  }
  return lambda;
}

}  // namespace gap_detail

/// −λ‖H‖² − n ≤ tr A_{ν_H}² − ‖H‖² − ‖∇ν_H‖² ≤ ‖α‖² − ‖H‖² − ‖∇ν_H‖² ≤ np/(2p−1).
inline GapStats gap_scan_es(const Immersion& imm, const QuadratureGrid& grid) {
  const NodeData nodes = evaluate_nodes(imm, grid);
  const int n = imm.domain_dim(), p = imm.codim();
  GapStats g;
  g.estimate = "es";
  g.minimal = all_minimal(nodes);
  g.upper_bound = double(n * p) / (2 * p - 1);
  const std::size_t N = nodes.shape.size();
  std::vector<double> lower(N), middle(N), conn(N);
  parallel_for(N, [&](std::size_t k) { conn[k] = gap_detail::conn_sq(imm, nodes.shape[k]); });
  g.nodes.columns = {"node", "h", "alpha_sq", "conn_sq", "lower_mid", "middle", "weight"};
  for (std::size_t k = 0; k < N; ++k) {
    const auto& sd = nodes.shape[k];
    const double h2 = sd.h_adapted ? sd.mean_curvature * sd.mean_curvature : 0.0;
    const double aH = sd.h_adapted ? sd.h_coeffs[0].squaredNorm() : 0.0;
    lower[k] = aH - h2 - conn[k];
    middle[k] = sd.alpha_sq - h2 - conn[k];
    g.nodes.rows.push_back({double(k), sd.mean_curvature, sd.alpha_sq, conn[k], lower[k], middle[k], nodes.measure[k]});
  }
  g.expressions = {range_of("lower_mid", lower), range_of("middle", middle)};
  gap_detail::finish_upper(g, nodes, middle);
  g.lambda = gap_detail::smallest_lambda(nodes, lower, n);
  return g;
}

/// −λ‖H‖² − 1 ≤ (1/‖H‖)tr(A_{ν_H}ΣA_j²) − ½‖α‖² − ‖∇ν_H‖² − ‖H‖²
///   ≤ ‖α‖² − ‖H‖² − ‖∇ν_H‖² ≤ np/(2p−1).
inline GapStats gap_scan_es2(const Immersion& imm, const QuadratureGrid& grid) {
  const NodeData nodes = evaluate_nodes(imm, grid);
  const int n = imm.domain_dim(), p = imm.codim();
  GapStats g;
  g.estimate = "es2";
  g.minimal = all_minimal(nodes);
  if (!g.minimal)
    for (const auto& sd : nodes.shape)
      if (!sd.h_adapted) throw NumericalError("mean curvature vanishes at x = " + format_point(sd.point));
  g.upper_bound = double(n * p) / (2 * p - 1);
  const std::size_t N = nodes.shape.size();
  std::vector<double> lower(N), middle(N), conn(N);
  parallel_for(N, [&](std::size_t k) { conn[k] = gap_detail::conn_sq(imm, nodes.shape[k]); });
  std::size_t chain_failures = 0;
  double objective_max = 0.0;
  g.nodes.columns = {"node", "h", "alpha_sq", "conn_sq", "middle2", "middle", "weight"};
  for (std::size_t k = 0; k < N; ++k) {
    const auto& sd = nodes.shape[k];
    middle[k] = sd.alpha_sq - (sd.h_adapted ? sd.mean_curvature * sd.mean_curvature : 0.0) - conn[k];
    if (sd.h_adapted) {
      const double h = sd.mean_curvature;
      lower[k] = gap_detail::lemma_numerator(sd) / h - 0.5 * sd.alpha_sq - conn[k] - h * h;
    } else {
      lower[k] = -0.5 * sd.alpha_sq;
      objective_max = std::max(objective_max, gap_detail::lemma_objective_max_over_normals(sd));
    }
    if (lower[k] > middle[k] + kEqualityTolerance * std::max(1.0, std::abs(middle[k]))) ++chain_failures;
    g.nodes.rows.push_back({double(k), sd.mean_curvature, sd.alpha_sq, conn[k], lower[k], middle[k], nodes.measure[k]});
  }
  g.expressions = {range_of("middle2", lower), range_of("middle", middle)};
  gap_detail::finish_upper(g, nodes, middle);
  g.lambda = gap_detail::smallest_lambda(nodes, lower, 1.0);
  g.middle_chain_holds = chain_failures == 0;
  g.middle_chain_failures = chain_failures;
  if (g.minimal) g.lemma_objective_max = objective_max;
  return g;
}

// ---------------------------------------------------------------------------
// Hyperbolic pinching

enum class HyperbolicTheorem { Thm15, Thm16 };
enum class HyperbolicBranch { Minimal, EqualityTriple, HypothesisBoundary, StrictInequality, HypothesisViolated };

inline std::string to_string(HyperbolicBranch b) {
  switch (b) {
    case HyperbolicBranch::Minimal:
      return "minimal";
    case HyperbolicBranch::EqualityTriple:
      return "equality-triple";
    case HyperbolicBranch::HypothesisBoundary:
      return "hypothesis-boundary";
    case HyperbolicBranch::StrictInequality:
      return "strict-inequality";
    case HyperbolicBranch::HypothesisViolated:
      return "hypothesis-violated";
  }
  return "?";
}

struct HyperbolicReport {
  HyperbolicTheorem theorem = HyperbolicTheorem::Thm15;
  HyperbolicBranch branch = HyperbolicBranch::StrictInequality;
  /// Thm15: E = ‖α‖² − ½‖H‖² − ‖∇ν_H‖², hypothesis 0 ≤ E ≤ n.
  /// Thm16: E = ‖α‖²((3 − n/2)‖α‖² − ‖H‖²) − (n‖α‖² + 2‖H‖²), hypothesis E ≤ 0.
  RangeStat expression;
  /// Distance of the expression range to the hypothesis boundary (negative
  /// when the hypothesis fails somewhere).
  double margin = 0.0;
  std::size_t violating_nodes = 0;
  /// max |‖α‖² − ½‖H‖² − n| (Thm15) or max |E| (Thm16).
  double equality_defect = 0.0;
  /// max |‖α‖² − ‖A_{ν_H}‖²|.
  double a_nuH_defect = 0.0;
  /// max ‖∇^ν ν_H‖².
  double conn_sq_max = 0.0;
  bool minimal = false;
  /// Values are per chart patch, not over a compact quotient.
  bool patch_only = true;
  NodeTable nodes;
};

inline HyperbolicReport hyperbolic_gap_check(const Immersion& imm, const QuadratureGrid& grid, HyperbolicTheorem which,
                                             double tol = kEqualityTolerance) {
  if (imm.ambient().model() != Model::HyperboloidInMinkowski || std::abs(imm.ambient().curvature() + 1.0) > 1e-12)
    throw ConfigError("hyperbolic gap check requires ambient curvature c = -1");
  const NodeData nodes = evaluate_nodes(imm, grid);
  const int n = imm.domain_dim();
  HyperbolicReport rep;
  rep.theorem = which;
  rep.minimal = all_minimal(nodes);
  const std::size_t N = nodes.shape.size();
  std::vector<double> expr(N), conn(N);
  parallel_for(N, [&](std::size_t k) { conn[k] = gap_detail::conn_sq(imm, nodes.shape[k]); });
  rep.nodes.columns = {"node", "h", "alpha_sq", "conn_sq", "expression"};
  std::size_t boundary = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const auto& sd = nodes.shape[k];
    const double h2 = sd.h_adapted ? sd.mean_curvature * sd.mean_curvature : 0.0;
    const double a = sd.alpha_sq;
    double e = 0.0, lo_margin = 0.0;
    if (which == HyperbolicTheorem::Thm15) {
      e = a - 0.5 * h2 - conn[k];
      lo_margin = std::min(e, n - e);
      rep.equality_defect = std::max(rep.equality_defect, std::abs(a - 0.5 * h2 - n));
    } else {
      e = a * ((3.0 - 0.5 * n) * a - h2) - (n * a + 2.0 * h2);
      lo_margin = -e;
      rep.equality_defect = std::max(rep.equality_defect, std::abs(e));
    }
    const double scale = std::max(1.0, std::abs(e));
    if (lo_margin < -tol * scale) ++rep.violating_nodes;
    else if (lo_margin <= tol * scale) ++boundary;
    rep.margin = k == 0 ? lo_margin : std::min(rep.margin, lo_margin);
    rep.a_nuH_defect = std::max(rep.a_nuH_defect, sd.h_adapted ? std::abs(a - sd.h_coeffs[0].squaredNorm()) : a);
    rep.conn_sq_max = std::max(rep.conn_sq_max, conn[k]);
    expr[k] = e;
    rep.nodes.rows.push_back({double(k), sd.mean_curvature, a, conn[k], e});
  }
  rep.expression = range_of(which == HyperbolicTheorem::Thm15 ? "thm15" : "thm16", expr);
  const bool equality = rep.equality_defect <= tol * std::max(1.0, double(n)) && rep.a_nuH_defect <= tol &&
                        rep.conn_sq_max <= tol;
  if (rep.minimal)
    rep.branch = HyperbolicBranch::Minimal;
  else if (rep.violating_nodes > 0)
    rep.branch = HyperbolicBranch::HypothesisViolated;
  else if (equality)
    rep.branch = HyperbolicBranch::EqualityTriple;
  else if (boundary > 0)
    rep.branch = HyperbolicBranch::HypothesisBoundary;
  else
    rep.branch = HyperbolicBranch::StrictInequality;
  return rep;
}

// ---------------------------------------------------------------------------

struct ScalarIdentity {
  double lhs = 0.0;  // ∫ s dμ
  double rhs = 0.0;  // n(n−1)c·Vol + Ψ − Π
  double theta = 0.0;
  double pi = 0.0;
  double defect = 0.0;
  /// defect / (|Θ_c| + |Π|): the two sides can cancel to zero (flat tori).
  double relative_defect = 0.0;
};

/// ∫ s_g dμ against n(n−1)c·Vol + Ψ − Π (= Θ_c − Π).  The left side traces
/// the Ricci tensor node by node; the right side uses the functional values.
inline ScalarIdentity total_scalar_identity(const Immersion& imm, const QuadratureGrid& grid) {
  const NodeData nodes = evaluate_nodes(imm, grid);
  const double c = imm.ambient().curvature();
  const int n = imm.domain_dim();
  ScalarIdentity out;
  out.lhs = nodes.integrate([&](const ShapeData& sd, std::size_t) { return ricci(sd, c).trace(); });
  out.pi = functional_value(nodes, Functional::Pi, c);
  out.theta = n * (n - 1) * c * nodes.total_measure() + functional_value(nodes, Functional::Psi, c);
  out.rhs = out.theta - out.pi;
  out.defect = std::abs(out.lhs - out.rhs);
  out.relative_defect = out.defect / std::max(std::abs(out.theta) + std::abs(out.pi), 1e-300);
  return out;
}

}  // namespace spaceform
