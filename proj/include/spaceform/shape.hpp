#pragma once

// Pointwise extrinsic geometry of an immersion: induced metric, orthonormal
// tangent and normal frames, second fundamental form coefficients, mean
// curvature, Ricci and scalar curvature, and the normal connection of the
// mean-curvature direction.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/ambient.hpp"
#include "spaceform/error.hpp"
#include "spaceform/immersion.hpp"

namespace spaceform {

/// Below this ‖H‖ a point counts as minimal and ν₁ is not H-adapted.
inline constexpr double kMeanCurvatureFloor = 1e-8;
inline constexpr double kMaxMetricCondition = 1e8;
inline constexpr double kNormalStencilStep = 1e-4;

struct ShapeData {
  ChartPoint point;
  Eigen::VectorXd position;
  Eigen::MatrixXd metric;
  /// Row a holds the chart components of e_a.
  Eigen::MatrixXd frame_coeffs;
  std::vector<AmbientVector> tangent_frame;
  std::vector<AmbientVector> normal_frame;
  std::vector<Eigen::MatrixXd> h_coeffs;
  double mean_curvature = 0.0;
  /// ν₁ = H/‖H‖ holds (‖H‖ > ε_H).
  bool h_adapted = false;
  std::optional<double> normal_conn_sq;
  double alpha_sq = 0.0;
  double volume_density = 0.0;

  int n() const { return static_cast<int>(metric.rows()); }
  int p() const { return static_cast<int>(h_coeffs.size()); }
  const std::vector<Eigen::MatrixXd>& shape_ops() const { return h_coeffs; }
  const Eigen::VectorXd& nu(int r) const { return normal_frame[static_cast<std::size_t>(r)].components; }
  const Eigen::VectorXd& e(int a) const { return tangent_frame[static_cast<std::size_t>(a)].components; }
  bool minimal() const { return !h_adapted; }
};

namespace shape_detail {

inline void remove_components(const AmbientSpace& space, Eigen::VectorXd& v, std::span<const Eigen::VectorXd> basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= space.flat_inner(v, b) * b;
}

inline double model_norm(const AmbientSpace& space, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, space.flat_inner(v, v)));
}

}  // namespace shape_detail

/// Completes `normals` to an orthonormal basis of the normal space at
/// `position`.  Seeds are tried first, in order; then coordinate axes, each
/// step taking the axis with the largest residual (lowest index on ties).
inline void complete_normal_frame(const AmbientSpace& space, const Eigen::VectorXd& position,
                                  std::span<const Eigen::VectorXd> tangent, std::vector<Eigen::VectorXd>& normals,
                                  int p, std::span<const Eigen::VectorXd> seeds = {}) {
  auto residual = [&](Eigen::VectorXd v) {
    v = space.project(position, v);
    shape_detail::remove_components(space, v, tangent);
    shape_detail::remove_components(space, v, normals);
    return v;
  };
  for (const auto& s : seeds) {
    if (static_cast<int>(normals.size()) >= p) break;
    Eigen::VectorXd v = residual(s);
    const double norm = shape_detail::model_norm(space, v);
    if (norm > 0.5 * std::max(1.0, shape_detail::model_norm(space, s))) normals.push_back(v / norm);
  }
  const int dim = space.flat_dim();
  while (static_cast<int>(normals.size()) < p) {
    int best = -1;
    double best_norm = 0.0;
    Eigen::VectorXd best_v;
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd v = residual(Eigen::VectorXd::Unit(dim, k));
      const double norm = shape_detail::model_norm(space, v);
      if (norm > best_norm + 1e-12) {
        best = k;
        best_norm = norm;
        best_v = v;
      }
    }
    if (best < 0 || best_norm < 1e-6) throw NumericalError("normal frame construction failed");
    best_v /= best_norm;
    shape_detail::remove_components(space, best_v, tangent);
    shape_detail::remove_components(space, best_v, normals);
    best_v /= shape_detail::model_norm(space, best_v);
    normals.push_back(best_v);
  }
}

/// Shape data from a map jet of order ≥ 2; the normal connection is left
/// empty.  `seeds` are candidate normals (e.g. an analytic frame).
inline ShapeData shape_from_jet(const AmbientSpace& space, const MapJet& jet, const ChartPoint& x,
                                std::span<const Eigen::VectorXd> seeds = {}) {
  const int n = jet.nvars();
  const int p = space.dim() - n;
  ShapeData sd;
  sd.point = x;
  sd.position = jet.value();

  std::vector<Eigen::VectorXd> d1(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d1[static_cast<std::size_t>(i)] = jet.d1(i);
  sd.metric.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      sd.metric(i, j) = sd.metric(j, i) =
          space.flat_inner(d1[static_cast<std::size_t>(i)], d1[static_cast<std::size_t>(j)]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sd.metric, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(n - 1);
  if (!(lo > 0) || hi / lo > kMaxMetricCondition)
    throw NumericalError("degenerate metric at x = " + format_point(x));
  sd.volume_density = std::sqrt(sd.metric.determinant());

  // Modified Gram–Schmidt in chart coordinates, two passes.
  sd.frame_coeffs = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd w = Eigen::VectorXd::Unit(n, a);
    for (int pass = 0; pass < 2; ++pass)
      for (int b = 0; b < a; ++b) {
        const Eigen::VectorXd eb = sd.frame_coeffs.row(b).transpose();
        w -= (w.dot(sd.metric * eb)) * eb;
      }
    w /= std::sqrt(w.dot(sd.metric * w));
    sd.frame_coeffs.row(a) = w.transpose();
  }
  std::vector<Eigen::VectorXd> tangent(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(space.flat_dim());
    for (int i = 0; i < n; ++i) v += sd.frame_coeffs(a, i) * d1[static_cast<std::size_t>(i)];
    tangent[static_cast<std::size_t>(a)] = v;
  }

  // α on chart pairs: normal part of the model-projected second derivative.
  std::vector<Eigen::VectorXd> alpha_chart(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd v = space.project(sd.position, jet.d2(i, j));
      for (const auto& e : tangent) v -= space.flat_inner(v, e) * e;
      alpha_chart[static_cast<std::size_t>(i * n + j)] = v;
      alpha_chart[static_cast<std::size_t>(j * n + i)] = v;
    }
  std::vector<Eigen::VectorXd> alpha(static_cast<std::size_t>(n * n));
  Eigen::VectorXd H = Eigen::VectorXd::Zero(space.flat_dim());
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(space.flat_dim());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          v += sd.frame_coeffs(a, i) * sd.frame_coeffs(b, j) * alpha_chart[static_cast<std::size_t>(i * n + j)];
      alpha[static_cast<std::size_t>(a * n + b)] = v;
      alpha[static_cast<std::size_t>(b * n + a)] = v;
      if (a == b) H += v;
    }

  sd.mean_curvature = shape_detail::model_norm(space, H);
  std::vector<Eigen::VectorXd> normals;
  if (sd.mean_curvature > kMeanCurvatureFloor) {
    sd.h_adapted = true;
    normals.push_back(H / sd.mean_curvature);
  }
  complete_normal_frame(space, sd.position, tangent, normals, p, seeds);

  sd.h_coeffs.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(n, n));
  sd.alpha_sq = 0.0;
  for (int r = 0; r < p; ++r) {
    auto& m = sd.h_coeffs[static_cast<std::size_t>(r)];
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        m(a, b) = m(b, a) = space.flat_inner(alpha[static_cast<std::size_t>(a * n + b)], normals[static_cast<std::size_t>(r)]);
    sd.alpha_sq += m.squaredNorm();
  }

  for (auto& t : tangent) sd.tangent_frame.push_back({sd.position, std::move(t)});
  for (auto& v : normals) sd.normal_frame.push_back({sd.position, std::move(v)});
  return sd;
}

inline std::vector<Eigen::VectorXd> analytic_normal_seeds(const Immersion& imm, const ChartPoint& x) {
  std::vector<Eigen::VectorXd> seeds;
  if (!imm.normal_frame()) return seeds;
  for (const auto& field : (*imm.normal_frame())(x, 0)) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(field.size()));
    for (std::size_t k = 0; k < field.size(); ++k) v[static_cast<Eigen::Index>(k)] = field[k].value();
    seeds.push_back(std::move(v));
  }
  return seeds;
}

/// Shape data without the normal-connection stencil.
inline ShapeData local_shape(const Immersion& imm, const ChartPoint& x) {
  const auto seeds = analytic_normal_seeds(imm, x);
  return shape_from_jet(imm.ambient(), imm.checked_jet(x, 2), x, seeds);
}

// ---------------------------------------------------------------------------
// Normal frame along stencils

/// ν₁ = H/‖H‖ at y, followed by the remaining members of `reference`
/// transported to y by normal projection and Gram–Schmidt.
inline std::vector<Eigen::VectorXd> transported_normal_frame(const Immersion& imm, const ChartPoint& y,
                                                             const ShapeData& reference) {
  const ShapeData sy = local_shape(imm, y);
  if (!sy.h_adapted) throw NumericalError("mean curvature vanishes at x = " + format_point(y));
  const auto& space = imm.ambient();
  std::vector<Eigen::VectorXd> tangent;
  for (const auto& e : sy.tangent_frame) tangent.push_back(e.components);
  std::vector<Eigen::VectorXd> out{sy.nu(0)};
  for (int s = 1; s < reference.p(); ++s) {
    Eigen::VectorXd v = space.project(sy.position, reference.nu(s));
    shape_detail::remove_components(space, v, tangent);
    shape_detail::remove_components(space, v, out);
    const double norm = shape_detail::model_norm(space, v);
    if (norm < 1e-6) throw NumericalError("normal frame transport failed at x = " + format_point(y));
    out.push_back(v / norm);
  }
  return out;
}

/// d[i][s] = ∂_i ν_s at the reference point, by 4th-order central differences.
using NormalFrameDerivatives = std::vector<std::vector<Eigen::VectorXd>>;

inline NormalFrameDerivatives normal_frame_derivatives(const Immersion& imm, const ShapeData& center,
                                                       double step = kNormalStencilStep) {
  if (!center.h_adapted) throw NumericalError("mean curvature vanishes at x = " + format_point(center.point));
  const auto& chart = imm.chart();
  step = chart.fit_step(center.point, step, 2.0);
  const int n = center.n();
  NormalFrameDerivatives d(static_cast<std::size_t>(n));
  static constexpr double kOffsets[4] = {-2.0, -1.0, 1.0, 2.0};
  static constexpr double kWeights[4] = {1.0, -8.0, 8.0, -1.0};
  for (int i = 0; i < n; ++i) {
    auto& di = d[static_cast<std::size_t>(i)];
    di.assign(static_cast<std::size_t>(center.p()), Eigen::VectorXd::Zero(imm.flat_dim()));
    for (int k = 0; k < 4; ++k) {
      ChartPoint y = center.point;
      y[i] += kOffsets[k] * step;
      const auto frame = transported_normal_frame(imm, chart.wrap(y), center);
      for (int s = 0; s < center.p(); ++s) di[static_cast<std::size_t>(s)] += kWeights[k] * frame[static_cast<std::size_t>(s)];
    }
    for (auto& v : di) v /= 12.0 * step;
  }
  return d;
}

/// omega[a](s,t) = ⟨∇^ν_{e_a} ν_s, ν_t⟩.
inline std::vector<Eigen::MatrixXd> normal_connection_forms(const Immersion& imm, const ShapeData& center,
                                                            const NormalFrameDerivatives& d) {
  const int n = center.n(), p = center.p();
  std::vector<Eigen::MatrixXd> omega(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(p, p));
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < p; ++s) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(imm.flat_dim());
      for (int i = 0; i < n; ++i) v += center.frame_coeffs(a, i) * d[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
      for (int t = 0; t < p; ++t) omega[static_cast<std::size_t>(a)](s, t) = imm.ambient().flat_inner(v, center.nu(t));
    }
  return omega;
}

inline double normal_connection_sq(const Immersion& imm, const ShapeData& center) {
  if (!center.h_adapted) throw NumericalError("mean curvature vanishes at x = " + format_point(center.point));
  if (center.p() == 1) return 0.0;
  const auto omega = normal_connection_forms(imm, center, normal_frame_derivatives(imm, center));
  double s = 0.0;
  for (const auto& w : omega)
    for (int t = 1; t < center.p(); ++t) s += w(0, t) * w(0, t);
  return s;
}

/// ‖∇^ν ν₁‖² at x; requires ‖H‖ > ε_H on the stencil.
inline double normal_connection_sq(const Immersion& imm, const ChartPoint& x) {
  return normal_connection_sq(imm, local_shape(imm, x));
}

/// Full shape data.  The normal connection is filled in when ‖H‖ > ε_H on
/// the stencil and the stencil fits in the chart.
inline ShapeData shape_data(const Immersion& imm, const ChartPoint& x) {
  ShapeData sd = local_shape(imm, x);
  if (sd.h_adapted) {
    try {
      sd.normal_conn_sq = normal_connection_sq(imm, sd);
    } catch (const NumericalError&) {
      sd.normal_conn_sq.reset();
    }
  }
  return sd;
}

// ---------------------------------------------------------------------------
// Intrinsic curvature from the Gauss equation

/// r(e_j,e_k) = (n−1)c δ_jk + ⟨H, α(e_j,e_k)⟩ − Σ_r Σ_i h^r_ij h^r_ik.
/// ⟨H, α⟩ is taken as Σ_r (tr h^r) h^r, which is h h¹ in an adapted frame.
inline Eigen::MatrixXd ricci(const ShapeData& sd, double c) {
  const int n = sd.n();
  Eigen::MatrixXd r = (n - 1) * c * Eigen::MatrixXd::Identity(n, n);
  for (const auto& A : sd.h_coeffs) r += A.trace() * A - A * A;
  return r;
}

/// s = n(n−1)c + h² − ‖α‖².
inline double scalar_curvature(const ShapeData& sd, double c) {
  const int n = sd.n();
  double h2 = 0.0;
  for (const auto& A : sd.h_coeffs) h2 += A.trace() * A.trace();
  return n * (n - 1) * c + h2 - sd.alpha_sq;
}

inline Eigen::MatrixXd ricci(const Immersion& imm, const ChartPoint& x) {
  return ricci(local_shape(imm, x), imm.ambient().curvature());
}

inline double scalar_curvature(const Immersion& imm, const ChartPoint& x) {
  return scalar_curvature(local_shape(imm, x), imm.ambient().curvature());
}

/// Mean curvature vector coefficients Σ_i h^r_ii.
inline Eigen::VectorXd mean_curvature_coeffs(const ShapeData& sd) {
  Eigen::VectorXd v(sd.p());
  for (int r = 0; r < sd.p(); ++r) v[r] = sd.h_coeffs[static_cast<std::size_t>(r)].trace();
  return v;
}

/// The same geometry expressed in the rotated frames e'_a = Σ_b Q(a,b) e_b
/// and ν'_s = Σ_t R(s−1,t−1) ν_t for s,t ≥ 2 (ν₁ kept).
inline ShapeData remix_frames(const ShapeData& sd, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  ShapeData out = sd;
  const int n = sd.n(), p = sd.p();
  out.frame_coeffs = Q * sd.frame_coeffs;
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(sd.position.size());
    for (int b = 0; b < n; ++b) v += Q(a, b) * sd.e(b);
    out.tangent_frame[static_cast<std::size_t>(a)].components = v;
  }
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(p, p);
  if (p > 1) full.bottomRightCorner(p - 1, p - 1) = R;
  for (int s = 0; s < p; ++s) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(sd.position.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < p; ++t) {
      v += full(s, t) * sd.nu(t);
      h += full(s, t) * sd.h_coeffs[static_cast<std::size_t>(t)];
    }
    out.normal_frame[static_cast<std::size_t>(s)].components = v;
    out.h_coeffs[static_cast<std::size_t>(s)] = Q * h * Q.transpose();
  }
  out.alpha_sq = 0.0;
  for (const auto& A : out.h_coeffs) out.alpha_sq += A.squaredNorm();
  return out;
}

}  // namespace spaceform
