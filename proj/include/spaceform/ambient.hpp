#pragma once

// Constant-curvature ambient spaces realized inside a flat coordinate space:
// the round sphere of radius 1/√c in R^{ñ+1}, the upper sheet of the
// hyperboloid ⟪x,x⟫ = 1/c in Minkowski space R^{1,ñ}, and R^ñ itself.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/error.hpp"
#include "spaceform/jet.hpp"

namespace spaceform {

enum class Model { SphereInFlat, HyperboloidInMinkowski, Euclidean };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::SphereInFlat:
      return "sphere";
    case Model::HyperboloidInMinkowski:
      return "hyperboloid";
    case Model::Euclidean:
      return "euclidean";
  }
  return "?";
}

/// Points farther than this from the model (in |⟨x,x⟩ − 1/c|) are rejected.
inline constexpr double kOnModelTolerance = 1e-9;

class AmbientSpace {
 public:
  static AmbientSpace sphere(int dim, double c = 1.0) {
    if (!(c > 0)) throw ConfigError("sphere model requires c > 0");
    return AmbientSpace(Model::SphereInFlat, dim, c);
  }
  static AmbientSpace hyperbolic(int dim, double c = -1.0) {
    if (!(c < 0)) throw ConfigError("hyperboloid model requires c < 0");
    return AmbientSpace(Model::HyperboloidInMinkowski, dim, c);
  }
  static AmbientSpace euclidean(int dim) { return AmbientSpace(Model::Euclidean, dim, 0.0); }

  Model model() const { return model_; }
  double curvature() const { return c_; }
  int dim() const { return dim_; }
  int flat_dim() const { return model_ == Model::Euclidean ? dim_ : dim_ + 1; }

  /// The model product of the flat coordinate space (Lorentz for the
  /// hyperboloid, Euclidean otherwise).
  double flat_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    double s = u.dot(v);
    if (model_ == Model::HyperboloidInMinkowski) s -= 2.0 * u[0] * v[0];
    return s;
  }

  Jet flat_inner(std::span<const Jet> u, std::span<const Jet> v) const {
    Jet s = u[0] * v[0];
    if (model_ == Model::HyperboloidInMinkowski) s = -s;
    for (std::size_t i = 1; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  }

  /// Residual |⟨x,x⟩ − 1/c| of a flat point (0 for Euclidean).
  double model_defect(const Eigen::VectorXd& x) const {
    if (model_ == Model::Euclidean) return 0.0;
    return std::abs(flat_inner(x, x) - 1.0 / c_);
  }

  void validate_point(const Eigen::VectorXd& x, double tol = kOnModelTolerance) const {
    if (x.size() != flat_dim()) throw NumericalError("point has wrong flat dimension");
    if (model_ == Model::HyperboloidInMinkowski && !(x[0] > 0))
      throw NumericalError("off-model: hyperboloid point with x0 <= 0");
    const double d = model_defect(x);
    if (!(d <= tol)) throw NumericalError("off-model: |<x,x> - 1/c| = " + std::to_string(d));
  }

  /// Nearest point on the model along the ray through x (sphere and
  /// hyperboloid); identity for Euclidean space.
  Eigen::VectorXd retract(const Eigen::VectorXd& x) const {
    if (model_ == Model::Euclidean) return x;
    const double q = c_ * flat_inner(x, x);
    if (!(q > 0)) throw NumericalError("degenerate deformation: point cannot be retracted onto the model");
    return x / std::sqrt(q);
  }

  std::vector<Jet> retract(std::span<const Jet> x) const {
    std::vector<Jet> out(x.begin(), x.end());
    if (model_ == Model::Euclidean) return out;
    Jet q = c_ * flat_inner(x, x);
    if (!(q.value() > 0)) throw NumericalError("degenerate deformation: point cannot be retracted onto the model");
    Jet s = pow(q, -0.5);
    for (auto& xi : out) xi = xi * s;
    return out;
  }

  /// Removes the component of v along the model normal at `point`.
  Eigen::VectorXd project(const Eigen::VectorXd& point, const Eigen::VectorXd& v) const {
    if (model_ == Model::Euclidean) return v;
    return v - (flat_inner(point, v) * c_) * point;
  }

 private:
  AmbientSpace(Model m, int dim, double c) : model_(m), dim_(dim), c_(c) {
    if (dim < 2) throw ConfigError("ambient dimension must be at least 2");
  }

  Model model_;
  int dim_;
  double c_;
};

/// A tangent vector of the model, in flat coordinates, attached to a base point.
struct AmbientVector {
  Eigen::VectorXd base;
  Eigen::VectorXd components;
};

namespace detail {
inline void require_same_base(const AmbientVector& u, const AmbientVector& v) {
  if (u.base.size() != v.base.size() || (u.base - v.base).lpNorm<Eigen::Infinity>() > 1e-12)
    throw NumericalError("frame mismatch");
}
}  // namespace detail

inline double inner(const AmbientSpace& space, const AmbientVector& u, const AmbientVector& v) {
  detail::require_same_base(u, v);
  return space.flat_inner(u.components, v.components);
}

/// R̃(X,Y)Z = c(⟨Y,Z⟩X − ⟨X,Z⟩Y).
inline AmbientVector curvature_operator(const AmbientSpace& space, const AmbientVector& x, const AmbientVector& y,
                                        const AmbientVector& z) {
  detail::require_same_base(x, y);
  detail::require_same_base(x, z);
  const double c = space.curvature();
  return {x.base, c * (inner(space, y, z) * x.components - inner(space, x, z) * y.components)};
}

inline AmbientVector project_tangent(const AmbientSpace& space, const Eigen::VectorXd& point,
                                     const Eigen::VectorXd& v) {
  return {point, space.project(point, v)};
}

}  // namespace spaceform
