#pragma once

// Finite-dimensional normal deformations of a base immersion, energies of
// the deformed immersions, central-difference gradients, Armijo descent and
// a first-variation consistency check against the Euler–Lagrange field.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/functionals.hpp"
#include "spaceform/immersion.hpp"
#include "spaceform/parallel.hpp"
#include "spaceform/quadrature.hpp"
#include "spaceform/shape.hpp"

namespace spaceform {

inline constexpr int kDefaultModes = 12;
inline constexpr double kGradientStep = 1e-5;

/// One basis field: monomial(f(x)) · G_g(x), where the monomial is taken in
/// the flat coordinates of the base point and G_g is a normal generator.
struct DeformationMode {
  std::vector<int> exponents;
  int generator = 0;
};

namespace flow_detail {

/// Determinant by cofactor expansion (small sizes only).
inline Jet det(const std::vector<std::vector<Jet>>& M) {
  const std::size_t N = M.size();
  if (N == 1) return M[0][0];
  if (N == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
  Jet s(0.0);
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<std::vector<Jet>> minor;
    for (std::size_t i = 1; i < N; ++i) {
      std::vector<Jet> row;
      for (std::size_t k = 0; k < N; ++k)
        if (k != j) row.push_back(M[i][k]);
      minor.push_back(std::move(row));
    }
    const Jet term = M[0][j] * det(minor);
    s = (j % 2 == 0) ? s + term : s - term;
  }
  return s;
}

/// Vector orthogonal (flat inner product) to all rows; rows.size() = N − 1.
inline std::vector<Jet> cross(const AmbientSpace& space, const std::vector<std::vector<Jet>>& rows) {
  const std::size_t N = rows.size() + 1;
  std::vector<Jet> X(N);
  for (std::size_t k = 0; k < N; ++k) {
    std::vector<std::vector<Jet>> M;
    for (const auto& r : rows) {
      std::vector<Jet> row;
      for (std::size_t j = 0; j < N; ++j)
        if (j != k) row.push_back(r[j]);
      M.push_back(std::move(row));
    }
    X[k] = (k % 2 == 0) ? det(M) : -det(M);
  }
  // Euclidean orthogonality X·v = 0 becomes Lorentz orthogonality for JX.
  if (space.model() == Model::HyperboloidInMinkowski) X[0] = -X[0];
  return X;
}

inline std::vector<Jet> scaled(const std::vector<Jet>& v, const Jet& s) {
  std::vector<Jet> out;
  for (const auto& x : v) out.push_back(x * s);
  return out;
}

inline void axpy(std::vector<Jet>& y, const Jet& a, const std::vector<Jet>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

/// Solves the symmetric system G y = b by Gaussian elimination on jets.
inline std::vector<Jet> solve(std::vector<std::vector<Jet>> G, std::vector<Jet> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Jet inv = 1.0 / G[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const Jet f = G[i][k] * inv;
      for (std::size_t j = k; j < n; ++j) G[i][j] -= f * G[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<Jet> y(n);
  for (std::size_t k = n; k-- > 0;) {
    Jet s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= G[k][j] * y[j];
    y[k] = s / G[k][k];
  }
  return y;
}

}  // namespace flow_detail

/// Normal generators along the base as jets of the given order.  Codimension
/// one uses the generalized cross product; an analytic frame is used when the
/// immersion has one; otherwise the normal projections of the flat axes.
inline std::vector<std::vector<Jet>> normal_generators(const Immersion& base, const ChartPoint& x, int order) {
  using namespace flow_detail;
  const auto& space = base.ambient();
  const int n = base.domain_dim(), N = base.flat_dim();
  const bool need_jets = base.codim() == 1 || !base.normal_frame();
  std::vector<Jet> f;
  std::vector<std::vector<Jet>> tangents;
  if (need_jets) {
    const auto full = base.raw_jets(x, order + 1);
    for (const auto& c : full) f.push_back(c.truncate(order));
    for (int i = 0; i < n; ++i) {
      std::vector<Jet> t;
      for (const auto& c : full) t.push_back(c.differentiate(i));
      tangents.push_back(std::move(t));
    }
  }
  if (base.codim() == 1) {
    std::vector<std::vector<Jet>> rows{f};
    rows.insert(rows.end(), tangents.begin(), tangents.end());
    std::vector<Jet> X = cross(space, rows);
    const Jet norm = sqrt(space.flat_inner(X, X));
    return {scaled(X, 1.0 / norm)};
  }
  if (base.normal_frame()) return (*base.normal_frame())(x, order);

  // v − c⟨f, v⟩f − Σ g^{ij}⟨v, ∂_j f⟩ ∂_i f for each flat axis v.
  std::vector<std::vector<Jet>> G(static_cast<std::size_t>(n), std::vector<Jet>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          space.flat_inner(tangents[static_cast<std::size_t>(i)], tangents[static_cast<std::size_t>(j)]);
  const double c = space.curvature();
  std::vector<std::vector<Jet>> gens;
  for (int a = 0; a < N; ++a) {
    std::vector<Jet> v(static_cast<std::size_t>(N), Jet(0.0));
    v[static_cast<std::size_t>(a)] = Jet(1.0);
    if (c != 0.0) {
      // ⟨f, e_a⟩ in the flat metric.
      const Jet fa = (space.model() == Model::HyperboloidInMinkowski && a == 0) ? -f[0] : f[static_cast<std::size_t>(a)];
      axpy(v, -c * fa, f);
    }
    std::vector<Jet> b;
    for (int i = 0; i < n; ++i) b.push_back(space.flat_inner(v, tangents[static_cast<std::size_t>(i)]));
    const auto y = solve(G, b);
    for (int i = 0; i < n; ++i) axpy(v, -y[static_cast<std::size_t>(i)], tangents[static_cast<std::size_t>(i)]);
    gens.push_back(std::move(v));
  }
  return gens;
}

inline int generator_count(const Immersion& base) {
  if (base.codim() == 1) return 1;
  if (base.normal_frame()) return base.codim();
  return base.flat_dim();
}

/// The first K modes: monomials by increasing degree (lexicographic within a
/// degree), each paired with every normal generator.
inline std::vector<DeformationMode> default_modes(const Immersion& base, int K = kDefaultModes) {
  std::vector<DeformationMode> modes;
  const int N = base.flat_dim(), G = generator_count(base);
  std::vector<std::vector<int>> monos{std::vector<int>(static_cast<std::size_t>(N), 0)};
  std::vector<std::vector<int>> frontier = monos;
  while (static_cast<int>(monos.size()) * G < K) {
    std::vector<std::vector<int>> next;
    for (const auto& m : frontier) {
      int last = N - 1;
      while (last >= 0 && m[static_cast<std::size_t>(last)] == 0) --last;
      for (int a = std::max(last, 0); a < N; ++a) {
        auto e = m;
        ++e[static_cast<std::size_t>(a)];
        next.push_back(e);
      }
    }
    monos.insert(monos.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  for (const auto& m : monos)
    for (int g = 0; g < G && static_cast<int>(modes.size()) < K; ++g) modes.push_back({m, g});
  return modes;
}

class DeformationFamily {
 public:
  DeformationFamily(Immersion base, std::vector<DeformationMode> modes)
      : base_(std::move(base)), modes_(std::move(modes)) {
    const int G = generator_count(base_);
    for (const auto& m : modes_) {
      if (m.generator < 0 || m.generator >= G) throw ConfigError("deformation mode refers to a missing normal generator");
      if (static_cast<int>(m.exponents.size()) != base_.flat_dim())
        throw ConfigError("deformation mode exponents must match the flat dimension");
    }
  }
  explicit DeformationFamily(Immersion base, int K = kDefaultModes)
      : DeformationFamily(base, default_modes(base, K)) {}

  const Immersion& base() const { return base_; }
  const std::vector<DeformationMode>& modes() const { return modes_; }
  int size() const { return static_cast<int>(modes_.size()); }

  /// Displacement field Σ c_k V_k as jets at x.
  std::vector<Jet> displacement(const ChartPoint& x, const Eigen::VectorXd& coeffs, int order) const {
    const auto f = base_.raw_jets(x, order);
    const auto gens = normal_generators(base_, x, order);
    std::vector<Jet> V(f.size(), Jet(0.0));
    for (int k = 0; k < size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      const auto& m = modes_[static_cast<std::size_t>(k)];
      Jet mono(coeffs[k]);
      for (std::size_t a = 0; a < f.size(); ++a)
        for (int e = 0; e < m.exponents[a]; ++e) mono = mono * f[a];
      flow_detail::axpy(V, mono, gens[static_cast<std::size_t>(m.generator)]);
    }
    return V;
  }

  /// The deformed immersion: retract(f + Σ c_k V_k).
  Immersion deformed(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != size()) throw ConfigError("coefficient vector has the wrong length");
    if (coeffs.isZero(0.0)) return base_;
    const auto self = *this;
    JetEvaluator eval = [self, coeffs](const ChartPoint& x, int order) {
      auto f = self.base_.raw_jets(x, order);
      const auto V = self.displacement(x, coeffs, order);
      for (std::size_t a = 0; a < f.size(); ++a) f[a] += V[a];
      return self.base_.ambient().retract(f);
    };
    Immersion out(base_.name() + " (deformed)", base_.ambient(), base_.chart(), std::move(eval));
    out.set_cover_factor(base_.cover_factor());
    return out;
  }

 private:
  Immersion base_;
  std::vector<DeformationMode> modes_;
};

/// Functional value of the deformed immersion.  A lost immersion condition
/// surfaces as "degenerate deformation".
inline double energy(const DeformationFamily& fam, const Eigen::VectorXd& coeffs, const QuadratureGrid& grid,
                     Functional which) {
  try {
    return functional_value(fam.deformed(coeffs), grid, which);
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    if (msg.rfind("degenerate deformation", 0) == 0) throw;
    throw NumericalError("degenerate deformation: " + msg);
  }
}

/// Central differences with step 1e-5·(1 + |c_k|).
inline Eigen::VectorXd grad_energy(const DeformationFamily& fam, const Eigen::VectorXd& coeffs,
                                   const QuadratureGrid& grid, Functional which) {
  Eigen::VectorXd g(fam.size());
  for (int k = 0; k < fam.size(); ++k) {
    const double t = kGradientStep * (1.0 + std::abs(coeffs[k]));
    Eigen::VectorXd plus = coeffs, minus = coeffs;
    plus[k] += t;
    minus[k] -= t;
    g[k] = (energy(fam, plus, grid, which) - energy(fam, minus, grid, which)) / (2.0 * t);
  }
  return g;
}

struct DescentStep {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct DescentResult {
  Eigen::VectorXd coeffs;
  double energy = 0.0;
  std::vector<DescentStep> trace;
  bool converged = false;
  /// Set when a degenerate deformation stopped the run early.
  std::optional<std::string> halted;
};

struct DescentOptions {
  int budget = 50;
  double tol = 1e-8;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 30;
  double initial_step = 1e-2;
};

/// Backtracking (Armijo) gradient descent; the trial step starts from the
/// Barzilai–Borwein estimate.  Accepted steps never increase the energy.
inline DescentResult descend(const DeformationFamily& fam, const Eigen::VectorXd& init, const QuadratureGrid& grid,
                             Functional which, const DescentOptions& opt = {}) {
  DescentResult res;
  res.coeffs = init;
  try {
    res.energy = energy(fam, init, grid, which);
    if (opt.budget <= 0) {
      res.trace.push_back({0, res.energy, 0.0, 0.0});
      return res;
    }
    Eigen::VectorXd g = grad_energy(fam, res.coeffs, grid, which);
    res.trace.push_back({0, res.energy, g.lpNorm<Eigen::Infinity>(), 0.0});
    Eigen::VectorXd prev_x, prev_g;
    for (int it = 1; it <= opt.budget; ++it) {
      if (g.lpNorm<Eigen::Infinity>() <= opt.tol) {
        res.converged = true;
        break;
      }
      double step = opt.initial_step;
      if (prev_x.size()) {
        const Eigen::VectorXd s = res.coeffs - prev_x, y = g - prev_g;
        const double sy = s.dot(y);
        if (sy > 0) step = s.squaredNorm() / sy;
      }
      bool accepted = false;
      Eigen::VectorXd x_new;
      double e_new = 0.0;
      for (int bt = 0; bt < opt.max_backtracks; ++bt, step *= opt.shrink) {
        x_new = res.coeffs - step * g;
        try {
          e_new = energy(fam, x_new, grid, which);
        } catch (const NumericalError&) {
          continue;
        }
        if (e_new <= res.energy - opt.armijo * step * g.squaredNorm()) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      prev_x = res.coeffs;
      prev_g = g;
      res.coeffs = x_new;
      res.energy = e_new;
      g = grad_energy(fam, res.coeffs, grid, which);
      res.trace.push_back({it, res.energy, g.lpNorm<Eigen::Infinity>(), step});
    }
    if (g.lpNorm<Eigen::Infinity>() <= opt.tol) res.converged = true;
  } catch (const NumericalError& e) {
    res.halted = e.what();
  }
  return res;
}

struct FirstVariation {
  double fd_derivative = 0.0;
  double residual_pairing = 0.0;
  /// |fd − pairing| / max(|fd|, |pairing|); 0 when both vanish.
  double defect = 0.0;
  bool richardson = false;
};

/// d/dt energy(t·direction) at 0 against ∫⟨E, V⟩ dμ, where E = Σ_r eq_r ν_r
/// is the pointwise Euler–Lagrange field and V the variation field.
inline FirstVariation first_variation_check(const DeformationFamily& fam, const QuadratureGrid& grid,
                                            Functional which, const Eigen::VectorXd& direction,
                                            const ELOptions& opt = {}) {
  FirstVariation out;
  if (direction.size() != fam.size()) throw ConfigError("direction has the wrong length");
  if (direction.isZero(0.0)) return out;
  const Immersion& base = fam.base();
  auto derivative = [&](double t) {
    return (energy(fam, t * direction, grid, which) - energy(fam, -t * direction, grid, which)) / (2.0 * t);
  };

  const NodeData nodes = evaluate_nodes(base, grid);
  const bool minimal = minimal_regime(nodes);
  std::vector<double> terms(nodes.shape.size(), 0.0);
  parallel_for(nodes.shape.size(), [&](std::size_t k) {
    const auto& sd = nodes.shape[k];
    if (minimal && which != Functional::Pi) return;
    const ELPoint pt = el_point(base, sd, which, minimal, opt);
    Eigen::VectorXd V(base.flat_dim());
    const auto Vj = fam.displacement(grid.nodes[k], direction, 0);
    for (int a = 0; a < V.size(); ++a) V[a] = Vj[static_cast<std::size_t>(a)].value();
    terms[k] = nodes.measure[k] * base.ambient().flat_inner(pt.vector, V);
  });
  out.residual_pairing = pairwise_sum(terms);

  const double t = kGradientStep;
  out.fd_derivative = derivative(t);
  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
  };
  out.defect = rel(out.fd_derivative, out.residual_pairing);
  if (out.defect > 0.01) {
    out.fd_derivative = (4.0 * derivative(0.5 * t) - out.fd_derivative) / 3.0;
    out.defect = rel(out.fd_derivative, out.residual_pairing);
    out.richardson = true;
  }
  return out;
}

}  // namespace spaceform
