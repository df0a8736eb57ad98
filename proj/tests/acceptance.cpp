// Acceptance run: one PASS/FAIL line per criterion with its measured values
// and wall time.  Exit status is the number of failed criteria (capped).

#include <sys/wait.h>

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace spaceform;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int k, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail << std::setprecision(6);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail << " [over runtime budget " << budget_s << " s]";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << title << ":" << o.detail.str() << " ("
            << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat << std::endl;
}

double max_at_random_points(const Immersion& imm, int count, unsigned seed,
                            const std::function<double(const ShapeData&)>& f) {
  std::mt19937_64 rng(seed);
  double m = 0.0;
  for (int i = 0; i < count; ++i) m = std::max(m, f(local_shape(imm, imm.chart().sample(rng, 0.05))));
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the CLI and returns (exit status, stdout bytes).
std::pair<int, std::string> run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("spaceform_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path out = dir / ("run" + std::to_string(counter++) + ".json");
  const std::string cmd =
      std::string("env -u SPACEFORM_OUTPUT_DIR ") + SPACEFORM_CLI + " " + args + " >" + out.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out)};
}

}  // namespace

int main() {
  std::cout << std::setprecision(6);

  criterion(1, "gap constants on minimal Clifford tori and the Veronese surface", 0.0, [](Outcome& o) {
    for (auto [m, n] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 4}}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto e = minimal_clifford_torus(m, n);
      const double d = max_at_random_points(e.immersion, 50, 1, [n](const ShapeData& sd) { return std::abs(sd.alpha_sq - n); });
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      o.detail << " clifford(" << m << "," << n << ") |alpha^2-n|=" << d;
      o.check(d <= 1e-8, "clifford alpha^2");
      o.check(secs < 5.0, "clifford runtime");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const double d =
        max_at_random_points(veronese().immersion, 50, 2, [](const ShapeData& sd) { return std::abs(sd.alpha_sq - 4.0 / 3.0); });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << " veronese |alpha^2-4/3|=" << d;
    o.check(d <= 1e-7, "veronese alpha^2");
    o.check(secs < 5.0, "veronese runtime");
  });

  criterion(2, "Veronese scalar curvature 2/3 and Einstein Ricci I/3", 0.0, [](Outcome& o) {
    const auto e = veronese();
    const double ds = max_at_random_points(e.immersion, 50, 3, [](const ShapeData& sd) {
      return std::abs(scalar_curvature(sd, 1.0) - 2.0 / 3.0);
    });
    const double dr = max_at_random_points(e.immersion, 50, 4, [](const ShapeData& sd) {
      return (ricci(sd, 1.0) - Eigen::MatrixXd::Identity(2, 2) / 3.0).cwiseAbs().maxCoeff();
    });
    o.detail << " |s-2/3|=" << ds << " |Ric-I/3|=" << dr;
    o.check(ds <= 1e-7 && dr <= 1e-7, "tolerance 1e-7");
  });

  criterion(3, "Gauss equation cross-check at 100 points per catalog entry", 30.0, [](Outcome& o) {
    double worst = 0.0;
    std::string worst_name;
    for (const auto& e : spaceform::testing::all_catalog_entries()) {
      std::mt19937_64 rng(5);
      for (int i = 0; i < 100; ++i) {
        const double d = gauss_check(e.immersion, e.immersion.chart().sample(rng, 0.05));
        if (d > worst) {
          worst = d;
          worst_name = e.immersion.name();
        }
      }
    }
    o.detail << " max defect=" << worst << " (" << worst_name << ")";
    o.check(worst <= 1e-6, "defect 1e-6");
  });

  criterion(4, "Simons inequality on 1e5 random tuples", 20.0, [](Outcome& o) {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> nd(2, 5), pd(1, 5);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const ShapeTuple t = random_tuple(rng, nd(rng), pd(rng));
      const double q = simons_quadratic(t), b = simons_bound(t);
      worst = std::max(worst, q / b);
      if (q > b * (1.0 + 1e-9)) ++violations;
    }
    double ratio_defect = 0.0;
    for (int m = 1; m <= 3; ++m) {
      const ShapeTuple c = clifford_tuple(m, 2 * m);
      const double a = c.alpha_sq();
      ratio_defect = std::max(ratio_defect, std::abs(simons_quadratic(c) / (a * a) - 1.0));
      o.check(simons_quadratic(c) <= simons_bound(c), "clifford bound");
    }
    o.detail << " violations=" << violations << " max q/bound=" << worst << " clifford |ratio-1|=" << ratio_defect;
    o.check(violations == 0, "no violations");
    o.check(ratio_defect <= 1e-12, "clifford ratio");
  });

  criterion(5, "Euler-Lagrange separation of Clifford tori", 0.0, [](Outcome& o) {
    const double sym = el_residual_pi(minimal_clifford_torus(1, 2).immersion,
                                      make_grid(minimal_clifford_torus(1, 2).immersion, std::nullopt, {32}))
                           .sup_residual;
    const auto ver = veronese();
    const double v = el_residual_pi(ver.immersion, make_grid(ver.immersion, std::nullopt, {24, 48})).sup_residual;
    const auto asym = minimal_clifford_torus(1, 3);
    const double a = el_residual_pi(asym.immersion, make_grid(asym.immersion, std::nullopt, {8, 8, 16})).sup_residual;
    // 2|Σk_i³| with k = (√2, −1/√2, −1/√2).
    const double oracle = 2.0 * std::abs(std::pow(std::sqrt(2.0), 3) + 2.0 * std::pow(-1.0 / std::sqrt(2.0), 3));
    double psi = 0.0;
    int minimal_entries = 0;
    for (const auto& e : spaceform::testing::all_catalog_entries()) {
      const auto grid = make_grid(e.immersion, std::nullopt, {8});
      if (!all_minimal(evaluate_nodes(e.immersion, grid))) continue;
      ++minimal_entries;
      psi = std::max(psi, el_residual_psi(e.immersion, grid).sup_residual);
    }
    o.detail << " Pi sym=" << sym << " veronese=" << v << " asym=" << a << " oracle=" << oracle << " Psi on "
             << minimal_entries << " minimal entries=" << psi;
    o.check(sym <= 1e-5 && v <= 1e-5, "critical residuals");
    o.check(a >= 0.1 && std::abs(a - oracle) <= 1e-6, "asymmetric residual");
    o.check(psi == 0.0, "Psi on minimal entries");
  });

  criterion(6, "multi-start maximization of trace(A1 sum A_k^2)", 120.0, [](Outcome& o) {
    struct Case {
      int n, p;
      double h;
    };
    for (const Case c : {Case{2, 1, 1.0}, Case{3, 2, 1.0}, Case{4, 3, 2.0}}) {
      const Lemma11Result r = lemma11_maximize(c.n, c.p, c.h, 64, 4000, 1);
      std::mt19937_64 rng(77);
      double best = -1e300;
      for (int i = 0; i < 1000000; ++i) best = std::max(best, lemma11_objective(lemma11_random_feasible(rng, c.n, c.p, c.h)));
      const auto& d = r.diagnostics;
      o.detail << " (" << c.n << "," << c.p << "," << c.h << "): value=" << r.value << " identity_rel=" << d.identity_defect
               << " off_a1=" << d.off_a1 << " random_best=" << best;
      o.check(r.value <= 1.5 * c.h + 1e-8, "bound 3h/2");
      o.check(d.identity_defect <= 1e-6, "critical identity");
      o.check(d.off_a1 <= 1e-6, "alpha^2 = |A1|^2");
      o.check(best <= r.value + 1e-6, "random search");
    }
  });

  criterion(7, "hyperbolic umbilic scans", 10.0, [](Outcome& o) {
    double worst15 = 0.0, worst16 = 0.0;
    for (int n : {2, 3})
      for (double k : {0.0, 0.3, 0.7, 1.0, 1.5}) {
        const auto e = hyperbolic_umbilic(n, k);
        const auto grid = make_grid(e.immersion, std::nullopt, {6});
        const double a = n * k * k, h2 = double(n) * n * k * k;
        const double e15 = a - 0.5 * h2, e16 = a * ((3.0 - 0.5 * n) * a - h2) - (n * a + 2.0 * h2);
        const auto r15 = hyperbolic_gap_check(e.immersion, grid, HyperbolicTheorem::Thm15);
        const auto r16 = hyperbolic_gap_check(e.immersion, grid, HyperbolicTheorem::Thm16);
        worst15 = std::max({worst15, std::abs(r15.expression.min - e15), std::abs(r15.expression.max - e15)});
        worst16 = std::max({worst16, std::abs(r16.expression.min - e16), std::abs(r16.expression.max - e16)});
        const bool branch_ok = k == 0.0 ? r15.branch == HyperbolicBranch::Minimal
                                        : r15.branch != HyperbolicBranch::Minimal &&
                                              r15.branch != HyperbolicBranch::EqualityTriple;
        o.detail << " n=" << n << ",k=" << k << ":" << to_string(r15.branch);
        o.check(branch_ok, "branch n=" + std::to_string(n) + " k=" + std::to_string(k));
      }
    o.detail << " max|E15-closed|=" << worst15 << " max|E16-closed|=" << worst16;
    o.check(worst15 <= 1e-9 && worst16 <= 1e-9, "closed forms");
  });

  criterion(8, "total scalar curvature identity on spherical entries", 0.0, [](Outcome& o) {
    double worst = 0.0;
    std::string worst_name;
    for (const auto& e : spaceform::testing::all_catalog_entries()) {
      if (e.immersion.ambient().model() != Model::SphereInFlat) continue;
      const ScalarIdentity s = total_scalar_identity(e.immersion, make_grid(e.immersion));
      if (s.relative_defect >= worst) {
        worst = s.relative_defect;
        worst_name = e.immersion.name();
      }
    }
    o.detail << " max relative defect=" << worst << " (" << worst_name << ")";
    o.check(worst <= 1e-6, "relative 1e-6");
  });

  criterion(9, "first-variation consistency", 60.0, [](Outcome& o) {
    const auto sphere = small_sphere(2, 0.8);
    const DeformationFamily sf(sphere.immersion);
    Eigen::VectorXd radial = Eigen::VectorXd::Zero(sf.size());
    radial[0] = 1.0;
    const FirstVariation a = first_variation_check(sf, make_grid(sphere.immersion), Functional::Psi, radial);
    const auto torus = minimal_clifford_torus(1, 2);
    const DeformationFamily tf(torus.immersion);
    const FirstVariation b =
        first_variation_check(tf, make_grid(torus.immersion), Functional::Pi, Eigen::VectorXd::Ones(tf.size()));
    o.detail << " sphere Psi fd=" << a.fd_derivative << " pairing=" << a.residual_pairing << " rel=" << a.defect
             << " | clifford Pi fd=" << b.fd_derivative << " pairing=" << b.residual_pairing;
    o.check(a.defect <= 0.02, "sphere 2%");
    o.check(std::abs(b.fd_derivative) <= 1e-4 && std::abs(b.residual_pairing) <= 1e-4, "clifford 1e-4");
  });

  criterion(10, "parallel second fundamental form identity on minimal Clifford tuples", 0.0, [](Outcome& o) {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n)
      for (int m = 1; m < n; ++m)
        for (const auto& M : corollary32_rhs(clifford_tuple(m, n), 1.0)) worst = std::max(worst, M.cwiseAbs().maxCoeff());
    o.detail << " max entry=" << worst;
    o.check(worst <= 1e-10, "entrywise 1e-10");
  });

  criterion(11, "byte-identical CLI records across repeated runs and thread counts", 0.0, [](Outcome& o) {
    const std::vector<std::string> commands{
        "catalog-list",
        "eval --immersion veronese --points 5 --seed 3",
        "functional --immersion 'small_sphere(n=2,r=0.8)' --functional Theta --resolution 12 24",
        "residual --immersion veronese --functional Pi --resolution 12 24",
        "gap --immersion 'clifford(m=1,n=2,r1=0.6)' --estimate es2 --resolution 12",
        "hyperbolic --immersion 'hyperbolic_umbilic(n=2,k=0.7)' --estimate thm15 --resolution 6",
        "simons --samples 2000 --seed 5",
        "lemma11 --n 3 --p 2 --h 1 --trials 8 --steps 300 --samples 2000 --seed 6",
        "flow --immersion 'clifford(m=1,n=2,r1=0.6)' --functional Psi --resolution 8 --modes 3 --budget 3",
        "variation-check --immersion 'small_sphere(n=2,r=0.8)' --functional Psi --resolution 8 16 --modes 3",
        "scalar-identity --immersion 'clifford(m=1,n=2)' --resolution 16",
    };
    int identical = 0;
    for (const auto& c : commands) {
      const auto a = run_cli(c + " --threads 1"), b = run_cli(c + " --threads 4"), d = run_cli(c);
      const bool ok = a.first == 0 && b.first == 0 && d.first == 0 && !a.second.empty() && a.second == b.second &&
                      a.second == d.second;
      identical += ok;
      o.check(ok, c.substr(0, c.find(' ')));
    }
    o.detail << " " << identical << "/" << commands.size() << " commands identical";
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return std::min(failures, 100);
}
