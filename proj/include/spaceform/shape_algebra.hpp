#pragma once

// Algebra of shape-operator tuples (A_1, …, A_p) detached from any immersion:
// Simons' quadratic form, the space-form curvature term, the algebraic right
// hand side of the ∇²α identity, and the constrained maximization of
// trace(A_1 Σ A_k²)/Σ trace A_k².

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/error.hpp"
#include "spaceform/parallel.hpp"

namespace spaceform {

struct ShapeTuple {
  int n = 0;
  int p = 0;
  std::vector<Eigen::MatrixXd> A;
  double h = 0.0;

  /// Validates symmetry and the trace constraints (trace A₁ = h ≥ 0,
  /// trace A_r = 0 for r ≥ 2).
  static ShapeTuple make(std::vector<Eigen::MatrixXd> mats, double tol = 1e-9) {
    if (mats.empty()) throw ConfigError("shape tuple needs p >= 1");
    ShapeTuple t;
    t.n = static_cast<int>(mats[0].rows());
    t.p = static_cast<int>(mats.size());
    for (std::size_t r = 0; r < mats.size(); ++r) {
      const auto& M = mats[r];
      if (M.rows() != t.n || M.cols() != t.n) throw ConfigError("shape tuple matrices must be n x n");
      if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol) throw ConfigError("shape operator not symmetric");
      if (r > 0 && std::abs(M.trace()) > tol * std::max(1.0, M.norm()))
        throw ConfigError("trace A_r must vanish for r >= 2");
    }
    t.h = mats[0].trace();
    if (t.h < -tol) throw ConfigError("trace A_1 = h must be nonnegative");
    t.h = std::max(t.h, 0.0);
    t.A = std::move(mats);
    return t;
  }

  double alpha_sq() const {
    double s = 0.0;
    for (const auto& M : A) s += M.squaredNorm();
    return s;
  }

  ShapeTuple scaled(double lambda) const {
    ShapeTuple t = *this;
    for (auto& M : t.A) M *= lambda;
    t.h *= lambda;
    return t;
  }
};

/// A_1 = diag(√((n−m)/m) ×m, −√(m/(n−m)) ×(n−m)), p = 1.
inline ShapeTuple clifford_tuple(int m, int n) {
  if (m < 1 || m >= n) throw ConfigError("clifford tuple requires 1 <= m < n");
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = i < m ? std::sqrt(double(n - m) / m) : -std::sqrt(double(m) / (n - m));
  ShapeTuple t;
  t.n = n;
  t.p = 1;
  t.A = {d.asDiagonal()};
  t.h = std::abs(d.sum()) < 1e-12 ? 0.0 : d.sum();
  return t;
}

/// Entries i.i.d. standard normal, symmetrized; trace A₁ kept (sign chosen
/// nonnegative), trace A_r removed for r ≥ 2.
template <class Rng>
ShapeTuple random_tuple(Rng& rng, int n, int p) {
  std::normal_distribution<double> N(0.0, 1.0);
  ShapeTuple t;
  t.n = n;
  t.p = p;
  for (int r = 0; r < p; ++r) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = N(rng);
    M = (0.5 * (M + M.transpose())).eval();
    if (r == 0) {
      if (M.trace() < 0) M = -M;
    } else {
      M -= (M.trace() / n) * Eigen::MatrixXd::Identity(n, n);
    }
    t.A.push_back(M);
  }
  t.h = t.A[0].trace();
  return t;
}

/// Σ_{r,s} (trace A_rA_s)² + Σ_{r,s} ‖[A_r,A_s]‖_F².
inline double simons_quadratic(const ShapeTuple& t) {
  double s = 0.0;
  for (int r = 0; r < t.p; ++r)
    for (int q = 0; q < t.p; ++q) {
      const auto& Ar = t.A[static_cast<std::size_t>(r)];
      const auto& Aq = t.A[static_cast<std::size_t>(q)];
      const double tr = (Ar * Aq).trace();
      s += tr * tr + (Ar * Aq - Aq * Ar).squaredNorm();
    }
  return s;
}

/// (2 − 1/p)‖A‖⁴.
inline double simons_bound(const ShapeTuple& t) {
  const double a = t.alpha_sq();
  return (2.0 - 1.0 / t.p) * a * a;
}

/// cn·A_r − 2c·h·δ_{r1}·Id (r is 0-based).
inline Eigen::MatrixXd curvature_term(const ShapeTuple& t, double c, int r) {
  if (r < 0 || r >= t.p) throw ConfigError("normal index out of range");
  Eigen::MatrixXd M = c * t.n * t.A[static_cast<std::size_t>(r)];
  if (r == 0) M -= 2.0 * c * t.h * Eigen::MatrixXd::Identity(t.n, t.n);
  return M;
}

/// (A∘Ã)(ν_r) = Σ_s trace(A_rA_s) A_s.
inline Eigen::MatrixXd a_circ_atilde(const ShapeTuple& t, int r) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(t.n, t.n);
  for (const auto& As : t.A) M += (t.A[static_cast<std::size_t>(r)] * As).trace() * As;
  return M;
}

/// (Λ∘A)(ν_r) = Σ_j [A_j,[A_j,A_r]]; ⟨Λ∘A_r, A_r⟩ = Σ_j ‖[A_j,A_r]‖².
inline Eigen::MatrixXd lambda_circ_a(const ShapeTuple& t, int r) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(t.n, t.n);
  const auto& Ar = t.A[static_cast<std::size_t>(r)];
  for (const auto& Aj : t.A) {
    const Eigen::MatrixXd inner = Aj * Ar - Ar * Aj;
    M += Aj * inner - inner * Aj;
  }
  return M;
}

/// Per normal direction ν_r:
///   −(A∘Ã + Λ∘A)_r + cn(A_r − (1/n) h δ_{r1} Id) + (∇²H)_r + A_H A_r,
/// where A_H = h A₁ and (∇²H)_r is caller data (zero when absent).
inline std::vector<Eigen::MatrixXd> corollary32_rhs(const ShapeTuple& t, double c,
                                                    const std::vector<Eigen::MatrixXd>* hessian_H = nullptr) {
  if (hessian_H && static_cast<int>(hessian_H->size()) != t.p) throw ConfigError("hessian slot needs p matrices");
  std::vector<Eigen::MatrixXd> out;
  const Eigen::MatrixXd AH = t.h * t.A[0];
  for (int r = 0; r < t.p; ++r) {
    const auto& Ar = t.A[static_cast<std::size_t>(r)];
    Eigen::MatrixXd M = -(a_circ_atilde(t, r) + lambda_circ_a(t, r)) + c * t.n * Ar;
    if (r == 0) M -= c * t.h * Eigen::MatrixXd::Identity(t.n, t.n);
    if (hessian_H) M += (*hessian_H)[static_cast<std::size_t>(r)];
    M += AH * Ar;
    out.push_back(M);
  }
  return out;
}

/// trace(A₁ Σ_k A_k²).
inline double lemma11_numerator(const ShapeTuple& t) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(t.n, t.n);
  for (const auto& M : t.A) S += M * M;
  return (t.A[0] * S).trace();
}

/// trace(A₁ Σ_k A_k²) / Σ_k trace A_k², extended by 0 at the origin.
inline double lemma11_objective(const ShapeTuple& t) {
  const double a = t.alpha_sq();
  if (a == 0.0) return 0.0;
  return lemma11_numerator(t) / a;
}

struct Lemma11Diagnostics {
  double numerator = 0.0;        // trace(A₁ΣA_k²)
  double alpha_sq = 0.0;         // ‖α‖²
  double a1_sq = 0.0;            // ‖A₁‖²
  double identity_rhs = 0.0;     // h(‖α‖²+2‖A₁‖²)/(n+2h²/‖α‖²)
  double identity_defect = 0.0;  // relative
  double lambda_first = 0.0;     // from λ₁h‖α‖⁴ = ‖α‖²·num
  double lambda_second = 0.0;    // from λ₁n‖α‖⁴ = ‖α‖²(‖α‖²+2‖A₁‖²) − 2h·num
  double multiplier_defect = 0.0;
  double off_a1 = 0.0;           // ‖α‖² − ‖A₁‖²
};

inline Lemma11Diagnostics lemma11_diagnostics(const ShapeTuple& t) {
  Lemma11Diagnostics d;
  d.numerator = lemma11_numerator(t);
  d.alpha_sq = t.alpha_sq();
  d.a1_sq = t.A[0].squaredNorm();
  d.off_a1 = d.alpha_sq - d.a1_sq;
  const double G = d.alpha_sq, h = t.h;
  if (G > 0) {
    d.identity_rhs = h * (G + 2.0 * d.a1_sq) / (t.n + 2.0 * h * h / G);
    d.identity_defect = std::abs(d.numerator - d.identity_rhs) / std::max(std::abs(d.identity_rhs), 1e-300);
    if (h > 0) d.lambda_first = d.numerator / (h * G);
    d.lambda_second = (G * (G + 2.0 * d.a1_sq) - 2.0 * h * d.numerator) / (t.n * G * G);
    d.multiplier_defect =
        std::abs(d.lambda_first - d.lambda_second) / std::max(std::abs(d.lambda_second), 1e-300);
  }
  return d;
}

struct Lemma11Result {
  ShapeTuple tuple;
  double value = 0.0;
  /// Projected-gradient norm at the returned point is below tolerance.
  bool converged = false;
  double gradient_norm = 0.0;
  int best_trial = -1;
  Lemma11Diagnostics diagnostics;
  std::vector<double> trial_values;
};

namespace lemma11_detail {

/// Geometry of the normalized feasible set: A₁ = (h/n)I + B₁, A_r = B_r with
/// B traceless and ‖B‖_F = ρ, ρ² = 1 − h²/n.  The objective there is the
/// numerator trace(A₁ΣA_k²), since Σ trace A_k² = 1.
struct Problem {
  int n, p;
  double h, rho;

  ShapeTuple tuple(const std::vector<Eigen::MatrixXd>& B) const {
    ShapeTuple t;
    t.n = n;
    t.p = p;
    t.h = h;
    t.A = B;
    t.A[0] += (h / n) * Eigen::MatrixXd::Identity(n, n);
    return t;
  }

  static double dot(const std::vector<Eigen::MatrixXd>& X, const std::vector<Eigen::MatrixXd>& Y) {
    double s = 0.0;
    for (std::size_t r = 0; r < X.size(); ++r) s += (X[r].array() * Y[r].array()).sum();
    return s;
  }

  void project_traceless(std::vector<Eigen::MatrixXd>& X) const {
    for (auto& M : X) {
      M = (0.5 * (M + M.transpose())).eval();
      M -= (M.trace() / n) * Eigen::MatrixXd::Identity(n, n);
    }
  }

  void normalize(std::vector<Eigen::MatrixXd>& B) const {
    const double norm = std::sqrt(dot(B, B));
    if (norm == 0.0) return;
    for (auto& M : B) M *= rho / norm;
  }

  /// Riemannian gradient of the numerator on the sphere of traceless tuples.
  std::vector<Eigen::MatrixXd> gradient(const std::vector<Eigen::MatrixXd>& B) const {
    const ShapeTuple t = tuple(B);
    std::vector<Eigen::MatrixXd> g(static_cast<std::size_t>(p));
    const auto& A1 = t.A[0];
    g[0] = 3.0 * A1 * A1;
    for (int r = 1; r < p; ++r) {
      const auto& Ar = t.A[static_cast<std::size_t>(r)];
      g[0] += Ar * Ar;
      g[static_cast<std::size_t>(r)] = A1 * Ar + Ar * A1;
    }
    project_traceless(g);
    if (rho > 0) {
      const double radial = dot(g, B) / (rho * rho);
      for (int r = 0; r < p; ++r) g[static_cast<std::size_t>(r)] -= radial * B[static_cast<std::size_t>(r)];
    } else {
      for (auto& M : g) M.setZero();
    }
    return g;
  }

  double value(const std::vector<Eigen::MatrixXd>& B) const { return lemma11_numerator(tuple(B)); }
};

struct Trial {
  std::vector<Eigen::MatrixXd> B;
  double value = -1e300;
  double grad_norm = 0.0;
};

inline Trial ascend(const Problem& P, std::vector<Eigen::MatrixXd> B, int steps, double tol) {
  Trial out;
  double step = 0.1;
  double f = P.value(B);
  auto g = P.gradient(B);
  double gn = std::sqrt(Problem::dot(g, g));
  for (int it = 0; it < steps && gn > tol; ++it) {
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      std::vector<Eigen::MatrixXd> C = B;
      for (int r = 0; r < P.p; ++r) C[static_cast<std::size_t>(r)] += step * g[static_cast<std::size_t>(r)];
      P.normalize(C);
      const double fc = P.value(C);
      if (fc >= f + 1e-4 * step * gn * gn || (fc > f && step < 1e-12)) {
        B = std::move(C);
        f = fc;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    g = P.gradient(B);
    gn = std::sqrt(Problem::dot(g, g));
    if (!accepted) break;
  }
  out.B = std::move(B);
  out.value = f;
  out.grad_norm = gn;
  return out;
}

}  // namespace lemma11_detail

/// Random point of the normalized feasible set used by lemma11_maximize.
template <class Rng>
ShapeTuple lemma11_random_feasible(Rng& rng, int n, int p, double h) {
  const double rho2 = 1.0 - h * h / n;
  if (rho2 < -1e-12) throw ConfigError("infeasible: h^2 > n with sum trace A_k^2 = 1");
  lemma11_detail::Problem P{n, p, h, std::sqrt(std::max(0.0, rho2))};
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<Eigen::MatrixXd> B(static_cast<std::size_t>(p), Eigen::MatrixXd(n, n));
  for (auto& M : B)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = N(rng);
  P.project_traceless(B);
  P.normalize(B);
  return P.tuple(B);
}

/// Multi-start projected-gradient ascent of the objective over tuples with
/// trace A₁ = h, trace A_r = 0 (r ≥ 2), normalized to Σ trace A_k² = 1.
/// Trials are independent and reduced by index: highest value wins, ties
/// (within 1e−9) go to the smallest ‖α‖² − ‖A₁‖².
inline Lemma11Result lemma11_maximize(int n, int p, double h, int trials, int steps, unsigned seed = 0,
                                      double tol = 1e-10) {
  if (n < 2) throw ConfigError("lemma11 requires n >= 2");
  if (p < 1) throw ConfigError("lemma11 requires p >= 1");
  if (!(h > 0)) throw ConfigError("lemma11 requires h > 0");
  if (trials < 1) throw ConfigError("lemma11 requires trials >= 1");
  if (h * h > n * (1.0 + 1e-12)) throw ConfigError("infeasible: h^2 > n with sum trace A_k^2 = 1");
  using namespace lemma11_detail;
  const Problem P{n, p, h, std::sqrt(std::max(0.0, 1.0 - h * h / n))};
  std::vector<Trial> results(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t k) {
    std::mt19937_64 rng(seed * 1000003ull + k);
    const ShapeTuple start = lemma11_random_feasible(rng, n, p, h);
    std::vector<Eigen::MatrixXd> B = start.A;
    B[0] -= (h / n) * Eigen::MatrixXd::Identity(n, n);
    results[k] = ascend(P, std::move(B), steps, tol);
  });
  Lemma11Result out;
  double best_off = 0.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    out.trial_values.push_back(r.value);
    const ShapeTuple t = P.tuple(r.B);
    const double off = t.alpha_sq() - t.A[0].squaredNorm();
    const bool better = out.best_trial < 0 || r.value > out.value + 1e-9 ||
                        (std::abs(r.value - out.value) <= 1e-9 && off < best_off);
    if (better) {
      out.best_trial = static_cast<int>(k);
      out.value = r.value;
      out.tuple = t;
      out.gradient_norm = r.grad_norm;
      best_off = off;
    }
  }
  out.converged = out.gradient_norm <= std::max(tol, 1e-8);
  out.diagnostics = lemma11_diagnostics(out.tuple);
  return out;
}

}  // namespace spaceform
