#pragma once

// Tensor-product quadrature on chart boxes.  Periodic axes always use the
// midpoint trapezoid rule (spectrally accurate for smooth periodic data);
// non-periodic axes use either one global Gauss–Legendre rule (ProductSphere)
// or composite two-point Gauss–Legendre panels (GaussLegendre, order 4).

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/error.hpp"
#include "spaceform/immersion.hpp"

namespace spaceform {

enum class GridScheme { TensorTrapezoidPeriodic, GaussLegendre, ProductSphere };

inline std::string to_string(GridScheme s) {
  switch (s) {
    case GridScheme::TensorTrapezoidPeriodic:
      return "trapezoid";
    case GridScheme::GaussLegendre:
      return "gauss-legendre";
    case GridScheme::ProductSphere:
      return "product-sphere";
  }
  return "?";
}

inline GridScheme parse_grid_scheme(const std::string& s) {
  if (s == "trapezoid" || s == "TensorTrapezoidPeriodic") return GridScheme::TensorTrapezoidPeriodic;
  if (s == "gauss-legendre" || s == "GaussLegendre") return GridScheme::GaussLegendre;
  if (s == "product-sphere" || s == "ProductSphere") return GridScheme::ProductSphere;
  throw ConfigError("unknown grid scheme '" + s + "'");
}

struct QuadratureGrid {
  GridScheme scheme = GridScheme::TensorTrapezoidPeriodic;
  std::vector<int> resolution;
  std::vector<ChartPoint> nodes;
  /// Chart-measure weights (multiply by √det g for the Riemannian measure).
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Nodes and weights of the N-point Gauss–Legendre rule on [−1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int N) {
  if (N < 1) throw ConfigError("Gauss-Legendre needs at least one node");
  std::vector<double> x(static_cast<std::size_t>(N)), w(static_cast<std::size_t>(N));
  for (int i = 0; i < (N + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= N; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = N * (z * p1 - p0) / (z * z - 1.0);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(N - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(N - 1 - i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (N % 2 == 1) x[static_cast<std::size_t>(N / 2)] = 0.0;
  return {x, w};
}

namespace quadrature_detail {

inline std::pair<std::vector<double>, std::vector<double>> axis_rule(const ChartAxis& a, GridScheme scheme, int N) {
  std::vector<double> x, w;
  if (a.periodic) {
    const double h = a.length() / N;
    for (int k = 0; k < N; ++k) {
      x.push_back(a.lo + (k + 0.5) * h);
      w.push_back(h);
    }
    return {x, w};
  }
  if (scheme == GridScheme::TensorTrapezoidPeriodic)
    throw ConfigError("trapezoid scheme requires a fully periodic chart");
  if (scheme == GridScheme::ProductSphere) {
    auto [gx, gw] = gauss_legendre(N);
    const double half = 0.5 * a.length(), mid = 0.5 * (a.lo + a.hi);
    for (int k = 0; k < N; ++k) {
      x.push_back(mid + half * gx[static_cast<std::size_t>(k)]);
      w.push_back(half * gw[static_cast<std::size_t>(k)]);
    }
    return {x, w};
  }
  // Composite two-point panels.
  const int panels = std::max(1, N / 2);
  const double ph = a.length() / panels;
  const double g = 1.0 / std::sqrt(3.0);
  for (int k = 0; k < panels; ++k) {
    const double mid = a.lo + (k + 0.5) * ph;
    x.push_back(mid - 0.5 * ph * g);
    x.push_back(mid + 0.5 * ph * g);
    w.push_back(0.5 * ph);
    w.push_back(0.5 * ph);
  }
  return {x, w};
}

}  // namespace quadrature_detail

inline GridScheme default_scheme(const Chart& chart) {
  for (const auto& a : chart.axes())
    if (!a.periodic) return GridScheme::ProductSphere;
  return GridScheme::TensorTrapezoidPeriodic;
}

/// Tensor grid on the chart box.  Missing resolution entries take the axis
/// defaults; a single entry applies to every axis.
inline QuadratureGrid make_grid(const Chart& chart, std::optional<GridScheme> scheme = std::nullopt,
                                std::vector<int> resolution = {}) {
  const int n = chart.dim();
  QuadratureGrid grid;
  grid.scheme = scheme.value_or(default_scheme(chart));
  if (resolution.size() == 1 && n > 1) resolution.assign(static_cast<std::size_t>(n), resolution[0]);
  if (!resolution.empty() && static_cast<int>(resolution.size()) != n)
    throw ConfigError("resolution needs 1 or " + std::to_string(n) + " entries");
  if (resolution.empty())
    for (const auto& a : chart.axes()) resolution.push_back(a.default_resolution);
  for (int r : resolution)
    if (r < 1) throw ConfigError("resolution entries must be positive");
  grid.resolution = resolution;

  std::vector<std::vector<double>> xs, ws;
  for (int i = 0; i < n; ++i) {
    auto [x, w] = quadrature_detail::axis_rule(chart.axis(i), grid.scheme, resolution[static_cast<std::size_t>(i)]);
    xs.push_back(std::move(x));
    ws.push_back(std::move(w));
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    ChartPoint p(n);
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      p[i] = xs[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
      w *= ws[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    }
    grid.nodes.push_back(std::move(p));
    grid.weights.push_back(w);
    int k = n - 1;
    while (k >= 0) {
      auto& ik = idx[static_cast<std::size_t>(k)];
      if (++ik < xs[static_cast<std::size_t>(k)].size()) break;
      ik = 0;
      --k;
    }
    if (k < 0) break;
  }
  return grid;
}

inline QuadratureGrid make_grid(const Immersion& imm, std::optional<GridScheme> scheme = std::nullopt,
                                std::vector<int> resolution = {}) {
  return make_grid(imm.chart(), scheme, std::move(resolution));
}

}  // namespace spaceform
