#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spaceform.hpp"

namespace spaceform::testing {

/// Every catalog family at representative parameters.
inline std::vector<CatalogEntry> all_catalog_entries() {
  std::vector<CatalogEntry> v;
  v.push_back(minimal_clifford_torus(1, 2));
  v.push_back(clifford_torus(1, 2, 0.6));
  v.push_back(minimal_clifford_torus(1, 3));
  v.push_back(minimal_clifford_torus(2, 4));
  v.push_back(veronese());
  v.push_back(equatorial_sphere(2, 2));
  v.push_back(equatorial_sphere(3, 1));
  v.push_back(small_sphere(2, 0.8));
  v.push_back(small_sphere(3, 0.6, 2));
  for (double k : {0.0, 0.3, 0.7, 1.0, 1.5}) v.push_back(hyperbolic_umbilic(2, k));
  v.push_back(hyperbolic_umbilic(3, 0.5));
  v.push_back(twisted_torus(0.6, 0.6, std::sqrt(0.28)));
  return v;
}

/// Torus of revolution ((R + r cos v) cos u, (R + r cos v) sin u, r sin v) in R³.
inline Immersion revolution_torus(double R = 2.0, double r = 1.0, int res = 32) {
  Chart chart({{0.0, 2.0 * std::numbers::pi, true, res}, {0.0, 2.0 * std::numbers::pi, true, res}});
  return Immersion::from_map("revolution_torus", AmbientSpace::euclidean(3), chart, [R, r](std::span<const Jet> x) {
    const Jet rho = R + r * cos(x[1]);
    return std::vector<Jet>{rho * cos(x[0]), rho * sin(x[0]), r * sin(x[1])};
  });
}

/// Unit flat torus (cos u, sin u, cos v, sin v) in R⁴ (g = Id).
inline Immersion flat_torus_r4(double a = 1.0, double b = 1.0, int res = 32) {
  Chart chart({{0.0, 2.0 * std::numbers::pi, true, res}, {0.0, 2.0 * std::numbers::pi, true, res}});
  return Immersion::from_map("flat_torus", AmbientSpace::euclidean(4), chart, [a, b](std::span<const Jet> x) {
    return std::vector<Jet>{a * cos(x[0]), a * sin(x[0]), b * cos(x[1]), b * sin(x[1])};
  });
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd M(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) M(i, j) = N(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  return qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
}

}  // namespace spaceform::testing
