#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace spaceform;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureGrid coarse(const Immersion& imm, std::vector<int> res) { return make_grid(imm, std::nullopt, std::move(res)); }

/// Graph (u, v, sin u) in R³; h vanishes exactly at u = π.
Immersion sine_graph() {
  Chart chart({{0.0, 2 * kPi, true, 3}, {0.0, 2 * kPi, true, 3}});
  return Immersion::from_map("sine_graph", AmbientSpace::euclidean(3), chart,
                             [](std::span<const Jet> x) { return std::vector<Jet>{x[0], x[1], sin(x[0])}; });
}

void expect_report_invariants(const ResidualReport& r) {
  EXPECT_GE(r.sup_residual, 0.0);
  EXPECT_LE(r.l2_residual, r.sup_residual * std::sqrt(r.total_measure) * (1 + 1e-12) + 1e-300);
}

}  // namespace

TEST(Functionals, ValueExamples) {
  const auto c12 = minimal_clifford_torus(1, 2);
  const auto grid = make_grid(c12.immersion);
  EXPECT_NEAR(functional_value(c12.immersion, grid, Functional::Pi), 4 * kPi * kPi, 1e-10);
  EXPECT_NEAR(functional_value(c12.immersion, grid, Functional::Psi), 0.0, 1e-20);

  const auto c24 = minimal_clifford_torus(2, 4);
  const auto g24 = make_grid(c24.immersion);
  EXPECT_NEAR(functional_value(c24.immersion, g24, Functional::Pi), 4 * *c24.known.volume, 1e-6 * *c24.known.volume);

  const auto v = veronese();
  EXPECT_NEAR(functional_value(v.immersion, make_grid(v.immersion), Functional::Pi), 4.0 / 3.0 * 6 * kPi, 1e-8);

  const auto eq = equatorial_sphere(2, 2);
  EXPECT_NEAR(functional_value(eq.immersion, make_grid(eq.immersion), Functional::Theta), 8 * kPi, 1e-8);
}

TEST(Functionals, ParseFunctional) {
  EXPECT_EQ(parse_functional("Pi"), Functional::Pi);
  EXPECT_EQ(parse_functional("psi"), Functional::Psi);
  EXPECT_EQ(parse_functional("Theta_c"), Functional::Theta);
  EXPECT_THROW(parse_functional("Omega"), ConfigError);
}

TEST(ELResidual, PiOnMinimalEntries) {
  const auto sym = minimal_clifford_torus(1, 2);
  const auto r1 = el_residual_pi(sym.immersion, make_grid(sym.immersion));
  EXPECT_TRUE(r1.minimal_flag);
  EXPECT_LE(r1.sup_residual, 1e-6);
  expect_report_invariants(r1);

  const auto sym4 = minimal_clifford_torus(2, 4);
  EXPECT_LE(el_residual_pi(sym4.immersion, coarse(sym4.immersion, {8, 8, 8, 8})).sup_residual, 1e-6);

  const auto v = veronese();
  EXPECT_LE(el_residual_pi(v.immersion, make_grid(v.immersion)).sup_residual, 1e-5);

  // Cube-sum oracle 2|Σ k_i³| on the asymmetric torus (m, n) = (1, 3).
  const auto asym = minimal_clifford_torus(1, 3);
  const double k1 = std::sqrt(2.0), k2 = -1.0 / std::sqrt(2.0);
  const double oracle = 2.0 * std::abs(k1 * k1 * k1 + 2 * k2 * k2 * k2);
  const auto r3 = el_residual_pi(asym.immersion, coarse(asym.immersion, {8, 8, 16}));
  EXPECT_NEAR(r3.sup_residual, oracle, 1e-6);
  EXPECT_GE(r3.sup_residual, 0.1);
}

TEST(ELResidual, PsiAndThetaVanishOnMinimalEntries) {
  for (const auto& e : {minimal_clifford_torus(1, 2), minimal_clifford_torus(2, 4), veronese(), equatorial_sphere(2, 2)}) {
    const auto grid = coarse(e.immersion, std::vector<int>(static_cast<std::size_t>(e.immersion.domain_dim()), 8));
    for (auto f : {Functional::Psi, Functional::Theta}) {
      const auto r = el_residual(e.immersion, grid, f);
      EXPECT_TRUE(r.minimal_flag) << e.immersion.name();
      EXPECT_EQ(r.sup_residual, 0.0);
      EXPECT_EQ(r.l2_residual, 0.0);
    }
  }
}

TEST(ELResidual, SmallSphereClosedForms) {
  for (double r : {0.5, 0.8}) {
    const double k = std::sqrt(1 - r * r) / r;
    const auto e = small_sphere(2, r);
    const auto grid = coarse(e.immersion, {12, 24});
    const int n = 2;
    const double psi = std::abs(2 * n * k * (n + n * k * k) - std::pow(n * k, 3));
    EXPECT_NEAR(el_residual_psi(e.immersion, grid).sup_residual, psi, 1e-8 * psi);
    EXPECT_NEAR(el_residual_pi(e.immersion, grid).sup_residual, 4 * k, 1e-8);
    // (3n − n²)ch − h³ + 2h trace A² with h = nk: 4k at n = 2.
    EXPECT_NEAR(el_residual_theta(e.immersion, grid).sup_residual, 4 * k, 1e-8);
    const auto rep = el_residual_psi(e.immersion, grid);
    EXPECT_FALSE(rep.minimal_flag);
    expect_report_invariants(rep);
  }
  // n = 3: the curvature coefficient 3n − n² vanishes, leaving |−h³ + 2h·nk²| = 9k³.
  const double r = 0.6, k = std::sqrt(1 - r * r) / r;
  const auto e3 = small_sphere(3, r);
  EXPECT_NEAR(el_residual_theta(e3.immersion, coarse(e3.immersion, {6, 6, 12})).sup_residual, 9 * k * k * k, 1e-8);
}

TEST(ELResidual, FlatCliffordTorusPsi) {
  const double r1 = 0.6, r2 = 0.8;
  const double k1 = r2 / r1, k2 = -r1 / r2;
  const double h = std::abs(k1 + k2), a = k1 * k1 + k2 * k2;
  const auto e = clifford_torus(1, 2, r1);
  const auto rep = el_residual_psi(e.immersion, coarse(e.immersion, {16, 16}));
  EXPECT_NEAR(rep.sup_residual, std::abs(4 * h + 2 * h * a - h * h * h), 1e-9);
  EXPECT_GT(rep.sup_residual, 0.1);
}

TEST(ELResidual, HyperbolicEquidistantIsNotPsiCritical) {
  const double k = 0.5;
  const int n = 2;
  const auto e = hyperbolic_umbilic(n, k);
  const double expected = std::abs(-2.0 * n * n * k + 2.0 * n * n * k * k * k - std::pow(n * k, 3));
  const auto rep = el_residual_psi(e.immersion, coarse(e.immersion, {6, 6}));
  EXPECT_NEAR(rep.sup_residual, expected, 1e-8);
  EXPECT_GT(rep.sup_residual, 0.1);
}

TEST(ELResidual, MixedMinimalityIsAnError) {
  const Immersion g = sine_graph();
  try {
    el_residual_psi(g, make_grid(g));
    FAIL() << "expected frame degeneration";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("frame degeneration; residual undefined"), std::string::npos);
  }
}

TEST(GapScan, EsExamples) {
  const auto eq = equatorial_sphere(2, 2);
  const auto g0 = gap_scan_es(eq.immersion, coarse(eq.immersion, {8, 16}));
  EXPECT_TRUE(g0.minimal);
  EXPECT_NEAR(g0.expressions[1].min, 0.0, 1e-14);
  EXPECT_NEAR(g0.expressions[1].max, 0.0, 1e-14);
  EXPECT_TRUE(g0.upper_holds);
  ASSERT_TRUE(g0.lambda.has_value());
  EXPECT_EQ(*g0.lambda, 0.0);

  for (int n : {2, 3}) {
    const auto c = minimal_clifford_torus(1, n);
    const auto g = gap_scan_es(c.immersion, coarse(c.immersion, std::vector<int>(static_cast<std::size_t>(n), 8)));
    EXPECT_EQ(g.upper_bound, n);
    EXPECT_TRUE(g.upper_equality);
    EXPECT_TRUE(g.upper_holds);
    EXPECT_EQ(g.violating_nodes, 0u);
  }
  const auto v = veronese();
  const auto gv = gap_scan_es(v.immersion, coarse(v.immersion, {8, 16}));
  EXPECT_NEAR(gv.upper_bound, 4.0 / 3.0, 1e-15);
  EXPECT_TRUE(gv.upper_equality);
}

TEST(GapScan, EsMiddleIsConstantOnFlatTori) {
  // p = 1: ‖α‖² − ‖H‖² = −2k₁k₂ = 2 for every radius, since k₁k₂ = −1.
  for (double r1 : {0.2, 0.6, 0.9}) {
    const auto e = clifford_torus(1, 2, r1);
    const auto g = gap_scan_es(e.immersion, coarse(e.immersion, {8, 8}));
    EXPECT_NEAR(g.expressions[1].min, 2.0, 1e-9);
    EXPECT_NEAR(g.expressions[1].max, 2.0, 1e-9);
    EXPECT_TRUE(g.upper_holds);
    EXPECT_NEAR(g.violation_mass, 0.0, 1e-12);
  }
}

TEST(GapScan, EsSmallSphereInHigherCodimension) {
  // S²(r) ⊂ S⁴: both chained expressions equal 2k² − 4k²; the lower bound
  // −λ·4k² − 2 needs λ = (2k² − 2)/(4k²).
  const auto e = small_sphere(2, 0.5, 2);
  const double k = std::sqrt(0.75) / 0.5;
  const auto g = gap_scan_es(e.immersion, coarse(e.immersion, {6, 12}));
  EXPECT_NEAR(g.expressions[1].max, -2 * k * k, 1e-9);
  EXPECT_NEAR(g.upper_bound, 4.0 / 3.0, 1e-15);
  EXPECT_TRUE(g.upper_holds);
  ASSERT_TRUE(g.lambda.has_value());
  EXPECT_NEAR(*g.lambda, (2 * k * k - 2) / (4 * k * k), 1e-12);
  EXPECT_NEAR(g.expressions[0].max, -2 * k * k, 1e-9);
}

TEST(GapScan, Es2SmallSphereChain) {
  const double r = 0.8, k = std::sqrt(1 - r * r) / r;
  const int n = 2;
  const auto e = small_sphere(n, r);
  const auto g = gap_scan_es2(e.immersion, coarse(e.immersion, {8, 16}));
  EXPECT_NEAR(g.expressions[0].max, k * k - 0.5 * n * k * k - n * n * k * k, 1e-10);
  EXPECT_NEAR(g.expressions[1].max, n * k * k - n * n * k * k, 1e-10);
  ASSERT_TRUE(g.middle_chain_holds.has_value());
  EXPECT_TRUE(*g.middle_chain_holds);
}

TEST(GapScan, Es2MinimalAndTwisted) {
  const auto v = veronese();
  const auto gv = gap_scan_es2(v.immersion, coarse(v.immersion, {8, 16}));
  EXPECT_TRUE(gv.minimal);
  EXPECT_TRUE(gv.upper_equality);
  ASSERT_TRUE(gv.lemma_objective_max.has_value());

  const auto t = twisted_torus(0.6, 0.6, std::sqrt(0.28));
  const auto gt = gap_scan_es2(t.immersion, coarse(t.immersion, {8, 8}));
  EXPECT_FALSE(gt.minimal);
  EXPECT_TRUE(*gt.middle_chain_holds);
  EXPECT_EQ(*gt.middle_chain_failures, 0u);
}

TEST(Hyperbolic, BranchesAndClosedForms) {
  for (int n : {2, 3}) {
    for (double k : {0.0, 0.3, 0.7, 1.0, 1.5}) {
      const auto e = hyperbolic_umbilic(n, k);
      const auto grid = coarse(e.immersion, std::vector<int>(static_cast<std::size_t>(n), 6));
      const double a = n * k * k, h2 = n * n * k * k;
      const auto r15 = hyperbolic_gap_check(e.immersion, grid, HyperbolicTheorem::Thm15);
      const auto r16 = hyperbolic_gap_check(e.immersion, grid, HyperbolicTheorem::Thm16);
      const double e15 = a - 0.5 * h2, e16 = a * ((3 - 0.5 * n) * a - h2) - (n * a + 2 * h2);
      EXPECT_NEAR(r15.expression.min, e15, 1e-9);
      EXPECT_NEAR(r15.expression.max, e15, 1e-9);
      EXPECT_NEAR(r16.expression.max, e16, 1e-9);
      EXPECT_TRUE(r15.patch_only || k > 1);
      if (k == 0.0) {
        EXPECT_EQ(r15.branch, HyperbolicBranch::Minimal);
      } else {
        EXPECT_NE(r15.branch, HyperbolicBranch::Minimal);
        EXPECT_NE(r15.branch, HyperbolicBranch::EqualityTriple);
        EXPECT_EQ(r15.branch, n == 2 ? HyperbolicBranch::HypothesisBoundary : HyperbolicBranch::HypothesisViolated);
      }
    }
  }
}

TEST(Hyperbolic, RequiresNegativeUnitCurvature) {
  const auto e = small_sphere(2, 0.8);
  EXPECT_THROW(hyperbolic_gap_check(e.immersion, coarse(e.immersion, {4, 8}), HyperbolicTheorem::Thm15), ConfigError);
}

TEST(ScalarIdentity, HoldsOnSphericalEntries) {
  for (const auto& e : {minimal_clifford_torus(1, 2), clifford_torus(1, 2, 0.6), veronese(), equatorial_sphere(2, 2),
                        small_sphere(2, 0.8), twisted_torus(0.6, 0.6, std::sqrt(0.28))}) {
    const auto s = total_scalar_identity(e.immersion, make_grid(e.immersion));
    EXPECT_LE(s.relative_defect, 1e-6) << e.immersion.name();
  }
  const auto eq = equatorial_sphere(2, 1);
  const auto s = total_scalar_identity(eq.immersion, make_grid(eq.immersion));
  EXPECT_NEAR(s.lhs, 2 * 4 * kPi, 1e-8);
  EXPECT_NEAR(s.rhs, 2 * 4 * kPi, 1e-8);
  const auto v = veronese();
  const auto sv = total_scalar_identity(v.immersion, make_grid(v.immersion));
  EXPECT_NEAR(sv.lhs, 2.0 / 3.0 * 6 * kPi, 1e-8);
}
