#include <random>

#include <gtest/gtest.h>

#include "spaceform.hpp"

using namespace spaceform;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

/// Random point on the model and random tangent vectors there.
struct Sampler {
  const AmbientSpace& space;
  std::mt19937_64 rng{7};
  std::normal_distribution<double> N{0.0, 1.0};

  Eigen::VectorXd gaussian(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = N(rng);
    return v;
  }
  Eigen::VectorXd point() {
    Eigen::VectorXd x = gaussian(space.flat_dim());
    if (space.model() == Model::HyperboloidInMinkowski) {
      x[0] = 0.0;
      const double s = x.tail(x.size() - 1).squaredNorm();
      x[0] = std::sqrt(1.0 / -space.curvature() + s);
      return x;
    }
    return space.retract(x);
  }
  AmbientVector tangent(const Eigen::VectorXd& p) { return project_tangent(space, p, gaussian(space.flat_dim())); }
};

}  // namespace

TEST(Ambient, InnerExamples) {
  const auto S = AmbientSpace::sphere(2);
  const AmbientVector e1{vec({0, 0, 1}), vec({1, 0, 0})};
  EXPECT_DOUBLE_EQ(inner(S, e1, e1), 1.0);

  const auto H = AmbientSpace::hyperbolic(2);
  const Eigen::VectorXd o = vec({1, 0, 0});
  EXPECT_DOUBLE_EQ(inner(H, {o, vec({0, 1, 0})}, {o, vec({0, 0, 1})}), 0.0);
  EXPECT_DOUBLE_EQ(inner(H, {o, vec({0, 2, 0})}, {o, vec({0, 2, 0})}), 4.0);
}

TEST(Ambient, InnerRejectsMismatchedBase) {
  const auto S = AmbientSpace::sphere(2);
  const AmbientVector u{vec({0, 0, 1}), vec({1, 0, 0})};
  const AmbientVector v{vec({1, 0, 0}), vec({0, 1, 0})};
  EXPECT_THROW(
      {
        try {
          inner(S, u, v);
        } catch (const NumericalError& e) {
          EXPECT_STREQ(e.what(), "frame mismatch");
          throw;
        }
      },
      NumericalError);
  EXPECT_THROW(curvature_operator(S, u, u, v), NumericalError);
}

TEST(Ambient, CurvatureOperatorExamples) {
  const Eigen::VectorXd p = vec({0, 0, 1});
  const AmbientVector X{p, vec({1, 0, 0})}, Y{p, vec({0, 1, 0})};
  const auto S = AmbientSpace::sphere(2);
  EXPECT_TRUE(curvature_operator(S, X, X, Y).components.isZero(0.0));
  EXPECT_TRUE(curvature_operator(S, X, Y, Y).components.isApprox(X.components));

  const Eigen::VectorXd o = vec({1, 0, 0});
  const AmbientVector U{o, vec({0, 1, 0})}, V{o, vec({0, 0, 1})};
  const auto H = AmbientSpace::hyperbolic(2);
  EXPECT_TRUE(curvature_operator(H, U, V, V).components.isApprox(-U.components));
}

TEST(Ambient, ProjectTangentExamples) {
  const auto S = AmbientSpace::sphere(2);
  const Eigen::VectorXd e1 = vec({1, 0, 0}), e2 = vec({0, 1, 0});
  EXPECT_TRUE(project_tangent(S, e1, e1).components.isZero(1e-15));
  EXPECT_TRUE(project_tangent(S, e1, e2).components.isApprox(e2));

  const auto H = AmbientSpace::hyperbolic(2);
  // Lorentz-orthogonal projection: v − c⟨p,v⟩p with ⟨p,v⟩ = −1, c = −1.
  const Eigen::VectorXd got = project_tangent(H, vec({1, 0, 0}), vec({1, 1, 0})).components;
  EXPECT_LT((got - vec({0, 1, 0})).norm(), 1e-15);
}

TEST(Ambient, OffModelPointsAreErrors) {
  const auto S = AmbientSpace::sphere(3, 4.0);
  EXPECT_NO_THROW(S.validate_point(vec({0.5, 0, 0, 0})));
  EXPECT_THROW(S.validate_point(vec({1, 0, 0, 0})), NumericalError);
  EXPECT_THROW(S.validate_point(vec({0.5, 0, 0})), NumericalError);
  const auto H = AmbientSpace::hyperbolic(2);
  EXPECT_THROW(H.validate_point(vec({-1, 0, 0})), NumericalError);
  EXPECT_THROW(AmbientSpace::sphere(3, -1.0), ConfigError);
  EXPECT_THROW(AmbientSpace::hyperbolic(3, 1.0), ConfigError);
}

class AmbientProperties : public ::testing::TestWithParam<int> {
 protected:
  AmbientSpace space() const {
    switch (GetParam()) {
      case 0:
        return AmbientSpace::sphere(4, 2.5);
      case 1:
        return AmbientSpace::hyperbolic(4, -0.7);
      default:
        return AmbientSpace::euclidean(4);
    }
  }
};

TEST_P(AmbientProperties, CurvatureSymmetriesAndSectionalCurvature) {
  const AmbientSpace S = space();
  Sampler s{S};
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd p = s.point();
    ASSERT_NO_THROW(S.validate_point(p));
    const AmbientVector X = s.tangent(p), Y = s.tangent(p), Z = s.tangent(p), W = s.tangent(p);
    const Eigen::VectorXd rxy = curvature_operator(S, X, Y, Z).components;
    const Eigen::VectorXd ryx = curvature_operator(S, Y, X, Z).components;
    EXPECT_LE((rxy + ryx).lpNorm<Eigen::Infinity>(), 1e-12);
    const double a = inner(S, curvature_operator(S, X, Y, Z), W);
    const double b = inner(S, curvature_operator(S, X, Y, W), Z);
    EXPECT_NEAR(a, -b, 1e-12 * std::max(1.0, std::abs(a)));
    const double denom = inner(S, X, X) * inner(S, Y, Y) - std::pow(inner(S, X, Y), 2);
    if (denom > 1e-3) EXPECT_NEAR(inner(S, curvature_operator(S, X, Y, Y), X) / denom, S.curvature(), 1e-10);
  }
}

TEST_P(AmbientProperties, ProjectionIsIdempotent) {
  const AmbientSpace S = space();
  Sampler s{S};
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd p = s.point();
    const Eigen::VectorXd once = s.tangent(p).components;
    const Eigen::VectorXd twice = project_tangent(S, p, once).components;
    EXPECT_LE((once - twice).lpNorm<Eigen::Infinity>(), 1e-13 * std::max(1.0, once.norm()));
  }
}

TEST_P(AmbientProperties, TangentProductIsPositive) {
  const AmbientSpace S = space();
  Sampler s{S};
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd p = s.point();
    const AmbientVector X = s.tangent(p);
    EXPECT_GT(inner(S, X, X), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, AmbientProperties, ::testing::Values(0, 1, 2));
