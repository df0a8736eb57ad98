#pragma once

// Chart-level differential operators: Christoffel symbols of the induced
// metric, the Riemann tensor by differencing them (used to cross-check the
// Gauss equation), gradients and the Laplace–Beltrami operator of scalar
// fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/immersion.hpp"
#include "spaceform/shape.hpp"

namespace spaceform {

inline constexpr double kGaussStencilStep = 1e-4;
inline constexpr double kLaplacianStep = 1e-3;

using ScalarField = std::function<double(const ChartPoint&)>;

namespace intrinsic_detail {
inline constexpr std::array<double, 4> kOffsets{-2.0, -1.0, 1.0, 2.0};
inline constexpr std::array<double, 4> kWeights{1.0, -8.0, 8.0, -1.0};
}  // namespace intrinsic_detail

/// Induced metric at y from a first-order jet.
inline Eigen::MatrixXd induced_metric(const Immersion& imm, const ChartPoint& y) {
  const MapJet j = imm.checked_jet(y, 1);
  const int n = imm.domain_dim();
  Eigen::MatrixXd g(n, n);
  std::vector<Eigen::VectorXd> d1;
  for (int i = 0; i < n; ++i) d1.push_back(j.d1(i));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      g(a, b) = g(b, a) = imm.ambient().flat_inner(d1[static_cast<std::size_t>(a)], d1[static_cast<std::size_t>(b)]);
  return g;
}

/// gamma[l](j,k) = Γ^l_jk, from the metric and its exact first derivatives.
inline std::vector<Eigen::MatrixXd> christoffel(const Immersion& imm, const ChartPoint& y) {
  const MapJet j = imm.checked_jet(y, 2);
  const int n = imm.domain_dim();
  const auto& space = imm.ambient();
  std::vector<Eigen::VectorXd> d1;
  for (int i = 0; i < n; ++i) d1.push_back(j.d1(i));
  std::vector<Eigen::VectorXd> d2(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) d2[static_cast<std::size_t>(a * n + b)] = d2[static_cast<std::size_t>(b * n + a)] = j.d2(a, b);
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g(a, b) = space.flat_inner(d1[static_cast<std::size_t>(a)], d1[static_cast<std::size_t>(b)]);
  // dg[k](a,b) = ∂_k g_ab
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        dg[static_cast<std::size_t>(k)](a, b) =
            space.flat_inner(d2[static_cast<std::size_t>(a * n + k)], d1[static_cast<std::size_t>(b)]) +
            space.flat_inner(d1[static_cast<std::size_t>(a)], d2[static_cast<std::size_t>(b * n + k)]);
  const Eigen::MatrixXd ginv = g.inverse();
  std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += ginv(l, m) * (dg[static_cast<std::size_t>(a)](m, b) + dg[static_cast<std::size_t>(b)](m, a) -
                             dg[static_cast<std::size_t>(m)](a, b));
        gamma[static_cast<std::size_t>(l)](a, b) = 0.5 * s;
      }
  return gamma;
}

/// R_{ijkw} = g(R(∂_i,∂_j)∂_k, ∂_w) with R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y],
/// flattened as index ((i*n + j)*n + k)*n + w.
inline std::vector<double> riemann_chart(const Immersion& imm, const ChartPoint& x, double step = kGaussStencilStep) {
  using namespace intrinsic_detail;
  const int n = imm.domain_dim();
  imm.chart().require_stencil(x, 2.0 * step);
  const auto gamma = christoffel(imm, x);
  const Eigen::MatrixXd g = induced_metric(imm, x);
  // dgamma[i][l](j,k) = ∂_i Γ^l_jk
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& di = dgamma[static_cast<std::size_t>(i)];
    di.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    for (int s = 0; s < 4; ++s) {
      ChartPoint y = x;
      y[i] += kOffsets[static_cast<std::size_t>(s)] * step;
      const auto gy = christoffel(imm, imm.chart().wrap(y));
      for (int l = 0; l < n; ++l) di[static_cast<std::size_t>(l)] += kWeights[static_cast<std::size_t>(s)] * gy[static_cast<std::size_t>(l)];
    }
    for (auto& m : di) m /= 12.0 * step;
  }
  auto G = [&](int l, int a, int b) { return gamma[static_cast<std::size_t>(l)](a, b); };
  std::vector<double> R(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd up(n);
        for (int l = 0; l < n; ++l) {
          double v = dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)](j, k) -
                     dgamma[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)](i, k);
          for (int m = 0; m < n; ++m) v += G(m, j, k) * G(l, i, m) - G(m, i, k) * G(l, j, m);
          up[l] = v;
        }
        const Eigen::VectorXd low = g * up;
        for (int w = 0; w < n; ++w) R[static_cast<std::size_t>(((i * n + j) * n + k) * n + w)] = low[w];
      }
  return R;
}

/// max over frame 4-tuples of |R(e_a,e_b,e_c,e_d) − (c(δ_bc δ_ad − δ_ac δ_bd)
///   + ⟨α(e_a,e_d),α(e_b,e_c)⟩ − ⟨α(e_a,e_c),α(e_b,e_d)⟩)|.
inline double gauss_check(const Immersion& imm, const ChartPoint& x, double step = kGaussStencilStep) {
  const int n = imm.domain_dim();
  const ShapeData sd = local_shape(imm, x);
  const std::vector<double> Rc = riemann_chart(imm, x, step);
  const Eigen::MatrixXd& E = sd.frame_coeffs;
  const double c = imm.ambient().curvature();
  auto idx = [n](int a, int b, int cc, int d) { return static_cast<std::size_t>(((a * n + b) * n + cc) * n + d); };
  // Transform one index at a time into the orthonormal frame.
  std::vector<double> T = Rc, U(Rc.size());
  for (int slot = 0; slot < 4; ++slot) {
    std::fill(U.begin(), U.end(), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d) {
            std::array<int, 4> id{a, b, cc, d};
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
              std::array<int, 4> src = id;
              src[static_cast<std::size_t>(slot)] = i;
              s += E(id[static_cast<std::size_t>(slot)], i) * T[idx(src[0], src[1], src[2], src[3])];
            }
            U[idx(a, b, cc, d)] = s;
          }
    std::swap(T, U);
  }
  double defect = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          double rhs = c * ((b == cc && a == d ? 1.0 : 0.0) - (a == cc && b == d ? 1.0 : 0.0));
          for (const auto& A : sd.h_coeffs) rhs += A(a, d) * A(b, cc) - A(a, cc) * A(b, d);
          defect = std::max(defect, std::abs(T[idx(a, b, cc, d)] - rhs));
        }
  return defect;
}

/// Chart gradient (∂_1 f, …, ∂_n f) by 4th-order central differences.
inline Eigen::VectorXd chart_gradient(const Chart& chart, const ScalarField& f, const ChartPoint& x,
                                      double step = kLaplacianStep) {
  using namespace intrinsic_detail;
  step = chart.fit_step(x, step, 2.0);
  Eigen::VectorXd grad(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      ChartPoint y = x;
      y[i] += kOffsets[static_cast<std::size_t>(k)] * step;
      s += kWeights[static_cast<std::size_t>(k)] * f(chart.wrap(y));
    }
    grad[i] = s / (12.0 * step);
  }
  return grad;
}

/// (1/√det g) ∂_i(√det g g^{ij} ∂_j f), by nested 4th-order central
/// differences in divergence form.
inline double laplace_beltrami(const Immersion& imm, const ScalarField& f, const ChartPoint& x,
                               double step = kLaplacianStep) {
  using namespace intrinsic_detail;
  const auto& chart = imm.chart();
  step = chart.fit_step(x, step, 4.0);
  const int n = imm.domain_dim();
  auto flux = [&](const ChartPoint& y) -> Eigen::VectorXd {
    const Eigen::MatrixXd g = induced_metric(imm, y);
    const Eigen::VectorXd df = chart_gradient(chart, f, y, step);
    return std::sqrt(g.determinant()) * g.ldlt().solve(df);
  };
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      ChartPoint y = x;
      y[i] += kOffsets[static_cast<std::size_t>(k)] * step;
      s += kWeights[static_cast<std::size_t>(k)] * flux(chart.wrap(y))[i];
    }
    div += s / (12.0 * step);
  }
  return div / std::sqrt(induced_metric(imm, x).determinant());
}

/// Divergence of a tangent field given by its chart components.
inline double divergence(const Immersion& imm, const std::function<Eigen::VectorXd(const ChartPoint&)>& field,
                         const ChartPoint& x, double step = kLaplacianStep) {
  using namespace intrinsic_detail;
  const auto& chart = imm.chart();
  step = chart.fit_step(x, step, 3.0);
  double div = 0.0;
  for (int i = 0; i < imm.domain_dim(); ++i) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      ChartPoint y = chart.wrap(x + kOffsets[static_cast<std::size_t>(k)] * step * Eigen::VectorXd::Unit(x.size(), i));
      s += kWeights[static_cast<std::size_t>(k)] * std::sqrt(induced_metric(imm, y).determinant()) * field(y)[i];
    }
    div += s / (12.0 * step);
  }
  return div / std::sqrt(induced_metric(imm, x).determinant());
}

}  // namespace spaceform
