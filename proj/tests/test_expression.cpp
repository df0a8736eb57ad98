#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace spaceform;

TEST(Expression, Precedence) {
  const std::vector<std::string> vars{"x", "y"};
  auto ev = [&](const std::string& s, double x = 2.0, double y = 3.0) { return Expression::parse(s, vars).eval({x, y}); };
  EXPECT_DOUBLE_EQ(ev("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(ev("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(ev("x ^ 2 * y"), 12.0);
  EXPECT_DOUBLE_EQ(ev("-x ^ 2"), -4.0);
  EXPECT_DOUBLE_EQ(ev("2 ^ -1"), 0.5);
  EXPECT_DOUBLE_EQ(ev("x - y - 1"), -2.0);
  EXPECT_DOUBLE_EQ(ev("12 / x / y"), 2.0);
  EXPECT_DOUBLE_EQ(ev("+x * -y"), -6.0);
  EXPECT_DOUBLE_EQ(ev("1.5e1 + .5"), 15.5);
  EXPECT_DOUBLE_EQ(ev("x ^ 0.5", 4.0), 2.0);
}

TEST(Expression, FunctionsAndConstants) {
  const std::vector<std::string> vars{"u"};
  const std::map<std::string, double> consts{{"r", 0.25}};
  for (double u : {0.1, 0.7, 1.3}) {
    auto ev = [&](const std::string& s) { return Expression::parse(s, vars, consts).eval({u}); };
    EXPECT_DOUBLE_EQ(ev("sin(u)"), std::sin(u));
    EXPECT_DOUBLE_EQ(ev("cos(u)"), std::cos(u));
    EXPECT_NEAR(ev("tan(u)"), std::tan(u), 1e-14);
    EXPECT_NEAR(ev("exp(u) * log(u)"), std::exp(u) * std::log(u), 1e-14);
    EXPECT_NEAR(ev("sqrt(u) + sinh(u) - cosh(u) + atan(u)"), std::sqrt(u) + std::sinh(u) - std::cosh(u) + std::atan(u), 1e-14);
    EXPECT_DOUBLE_EQ(ev("r * pi"), 0.25 * std::numbers::pi);
  }
}

TEST(Expression, JetEvaluationCarriesDerivatives) {
  const Expression e = Expression::parse("sin(u) * v ^ 3", {"u", "v"});
  const ChartPoint x = (ChartPoint(2) << 0.4, 1.2).finished();
  const auto jets = seed_jets(x, 2);
  const Jet f = e.eval(jets);
  EXPECT_NEAR(f.value(), std::sin(0.4) * std::pow(1.2, 3), 1e-14);
  EXPECT_NEAR(f.differentiate(0).value(), std::cos(0.4) * std::pow(1.2, 3), 1e-13);
  EXPECT_NEAR(f.differentiate(1).value(), 3 * std::sin(0.4) * 1.44, 1e-13);
  EXPECT_NEAR(f.differentiate(0).differentiate(1).value(), 3 * std::cos(0.4) * 1.44, 1e-12);
}

TEST(Expression, Errors) {
  const std::vector<std::string> vars{"u"};
  for (const char* bad : {"", "u +", "(u", "u)", "foo(u)", "w", "sin(u", "2 $ u", "*u"})
    EXPECT_THROW(Expression::parse(bad, vars), ConfigError) << bad;
}

TEST(InlineImmersion, MatchesTheCatalogCliffordTorus) {
  const double r = std::sqrt(0.5);
  InlineSpec spec;
  spec.name = "inline_clifford";
  spec.ambient_dim = 3;
  spec.variables = {"u", "v"};
  spec.axes = {{0.0, 2 * std::numbers::pi, true, 32}, {0.0, 2 * std::numbers::pi, true, 32}};
  spec.components = {"r*cos(u)", "r*sin(u)", "r*cos(v)", "r*sin(v)"};
  spec.constants = {{"r", r}};
  const Immersion imm = inline_immersion(spec);
  const auto cat = minimal_clifford_torus(1, 2);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const ChartPoint x = imm.chart().sample(rng);
    const ShapeData a = local_shape(imm, x), b = local_shape(cat.immersion, x);
    EXPECT_NEAR(a.alpha_sq, b.alpha_sq, 1e-12);
    EXPECT_NEAR(a.alpha_sq, 2.0, 1e-12);
    EXPECT_NEAR(a.mean_curvature, 0.0, 1e-12);
  }
  const auto grid = make_grid(imm, std::nullopt, {16});
  EXPECT_NEAR(functional_value(imm, grid, Functional::Pi), functional_value(cat.immersion, grid, Functional::Pi), 1e-10);
}

TEST(InlineImmersion, RetractionPlacesOffModelMapsOnTheSphere) {
  // The unnormalized graph (cos u, sin u, cos v, sin v) retracts onto the
  // minimal Clifford torus.
  InlineSpec spec;
  spec.variables = {"u", "v"};
  spec.axes = {{0.0, 2 * std::numbers::pi, true, 16}, {0.0, 2 * std::numbers::pi, true, 16}};
  spec.components = {"cos(u)", "sin(u)", "cos(v)", "sin(v)"};
  EXPECT_THROW(local_shape(inline_immersion(spec), ChartPoint::Constant(2, 0.3)), NumericalError);
  spec.retract = true;
  const ShapeData sd = local_shape(inline_immersion(spec), ChartPoint::Constant(2, 0.3));
  EXPECT_NEAR(sd.alpha_sq, 2.0, 1e-12);
}

TEST(InlineImmersion, RejectsInconsistentSpecs) {
  InlineSpec spec;
  spec.variables = {"u", "v"};
  spec.axes = {{0.0, 1.0, false, 8}};
  spec.components = {"u", "v", "0", "1"};
  EXPECT_THROW(inline_immersion(spec), ConfigError);
  spec.axes.push_back({0.0, 1.0, false, 8});
  spec.components.pop_back();
  EXPECT_THROW(inline_immersion(spec), ConfigError);
  spec.components = {"u", "v", "0", "q"};
  EXPECT_THROW(inline_immersion(spec), ConfigError);
}
