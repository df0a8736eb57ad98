#pragma once

// Closed-form immersions with analytically known invariants: Clifford tori,
// the Veronese surface, equatorial and small spheres, umbilic hypersurfaces
// of hyperbolic space, and a twisted flat torus in S⁵.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/ambient.hpp"
#include "spaceform/error.hpp"
#include "spaceform/immersion.hpp"
#include "spaceform/shape.hpp"

namespace spaceform {

struct KnownValues {
  std::optional<double> alpha_sq;
  std::optional<double> h;
  /// Principal curvatures along ν₁ (p = 1 or umbilic), up to orientation.
  std::optional<std::vector<double>> principal_curvatures;
  std::optional<double> scalar_curvature;
  std::optional<double> volume;
  std::optional<double> normal_conn_sq;
};

struct CatalogEntry {
  std::string name;
  std::map<std::string, double> params;
  Immersion immersion;
  KnownValues known;
};

struct ParamInfo {
  std::string name;
  std::string description;
  std::optional<double> default_value;
};

struct CatalogInfo {
  std::string name;
  std::string description;
  std::vector<ParamInfo> params;
};

/// Volume of the round sphere S^k(R).
inline double sphere_volume(int k, double R = 1.0) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1)) * std::pow(R, k);
}

namespace catalog_detail {

inline constexpr int kPeriodicResolution = 64;
inline constexpr int kLatitudeResolution = 48;
inline constexpr int kLongitudeResolution = 96;

/// Hyperspherical unit vector in R^{k+1} from k angles: ψ₁…ψ_{k−1} ∈ [0,π],
/// ψ_k ∈ [0,2π).
inline std::vector<Jet> unit_sphere(std::span<const Jet> psi) {
  const std::size_t k = psi.size();
  std::vector<Jet> u(k + 1);
  Jet prod(1.0);
  for (std::size_t i = 0; i < k; ++i) {
    u[i] = prod * cos(psi[i]);
    prod = prod * sin(psi[i]);
  }
  u[k] = prod;
  return u;
}

// The metric of S^n in polar coordinates has condition 1/(sin²ψ₁ ⋯ sin²ψ_{n−1})
// at the first latitude node; pick the largest Gauss-Legendre count (at most
// kLatitudeResolution) keeping it below 1e7, well inside kMaxMetricCondition.
inline int latitude_resolution(int n) {
  for (int N = kLatitudeResolution; N > 2; --N) {
    const double psi0 = 0.5 * std::numbers::pi * (1.0 - std::cos(std::numbers::pi * 0.75 / (N + 0.5)));
    if (2.0 * (n - 1) * std::log10(std::sin(psi0)) >= -7.0) return N;
  }
  return 2;
}
inline int longitude_resolution(int n) { return 2 * latitude_resolution(n); }

/// Chart axes for S^k: k−1 latitudes and one longitude.
inline std::vector<ChartAxis> sphere_axes(int k, int lat_res, int lon_res, int circle_res) {
  std::vector<ChartAxis> axes;
  for (int i = 0; i + 1 < k; ++i) axes.push_back({0.0, std::numbers::pi, false, lat_res});
  axes.push_back({0.0, 2.0 * std::numbers::pi, true, k == 1 ? circle_res : lon_res});
  return axes;
}

inline std::vector<Jet> as_jets(const Eigen::VectorXd& v) {
  std::vector<Jet> out;
  for (int i = 0; i < v.size(); ++i) out.emplace_back(v[i]);
  return out;
}

inline int require_int(double v, const std::string& name) {
  if (std::abs(v - std::round(v)) > 1e-12) throw ConfigError("parameter " + name + " must be an integer");
  return static_cast<int>(std::lround(v));
}

}  // namespace catalog_detail

/// S^m(r1) × S^{n−m}(r2) ⊂ S^{n+1}, r1² + r2² = 1.
inline CatalogEntry clifford_torus(int m, int n, double r1, std::optional<double> r2_in = std::nullopt) {
  using namespace catalog_detail;
  if (m < 1 || m >= n) throw ConfigError("clifford torus requires 1 <= m < n");
  if (!(r1 > 0 && r1 < 1)) throw ConfigError("clifford torus requires 0 < r1 < 1");
  const double r2 = r2_in.value_or(std::sqrt(1.0 - r1 * r1));
  if (!(r2 > 0) || std::abs(r1 * r1 + r2 * r2 - 1.0) > 1e-12)
    throw ConfigError("clifford torus requires r1^2 + r2^2 = 1 (within 1e-12)");
  const bool coarse = n >= 4;
  const int lat = coarse ? 12 : kLatitudeResolution, lon = coarse ? 24 : kLongitudeResolution;
  const int circ = coarse ? 16 : kPeriodicResolution;
  auto axes = sphere_axes(m, lat, lon, circ);
  auto axes2 = sphere_axes(n - m, lat, lon, circ);
  axes.insert(axes.end(), axes2.begin(), axes2.end());
  Chart chart(axes);
  JetMap map = [m, r1, r2](std::span<const Jet> x) {
    auto U = unit_sphere(x.first(static_cast<std::size_t>(m)));
    auto V = unit_sphere(x.subspan(static_cast<std::size_t>(m)));
    std::vector<Jet> f;
    for (auto& u : U) f.push_back(r1 * u);
    for (auto& v : V) f.push_back(r2 * v);
    return f;
  };
  std::ostringstream name;
  name << "clifford(m=" << m << ",n=" << n << ",r1=" << r1 << ")";
  CatalogEntry e{"clifford", {{"m", m}, {"n", n}, {"r1", r1}, {"r2", r2}},
                 Immersion::from_map(name.str(), AmbientSpace::sphere(n + 1), chart, map), {}};
  e.immersion.set_constant_mean_curvature(true);
  e.immersion.set_normal_frame([m, r1, r2](const ChartPoint& x, int order) {
    auto s = seed_jets(x, order);
    auto U = unit_sphere(std::span<const Jet>(s).first(static_cast<std::size_t>(m)));
    auto V = unit_sphere(std::span<const Jet>(s).subspan(static_cast<std::size_t>(m)));
    std::vector<Jet> N;
    for (auto& u : U) N.push_back(-r2 * u);
    for (auto& v : V) N.push_back(r1 * v);
    return std::vector<std::vector<Jet>>{N};
  });
  const double k1 = r2 / r1, k2 = -r1 / r2;
  std::vector<double> pc(static_cast<std::size_t>(m), k1);
  pc.insert(pc.end(), static_cast<std::size_t>(n - m), k2);
  e.known.principal_curvatures = pc;
  e.known.h = std::abs(m * k1 + (n - m) * k2);
  e.known.alpha_sq = m * k1 * k1 + (n - m) * k2 * k2;
  e.known.scalar_curvature = n * (n - 1) + *e.known.h * *e.known.h - *e.known.alpha_sq;
  e.known.volume = sphere_volume(m, r1) * sphere_volume(n - m, r2);
  e.known.normal_conn_sq = 0.0;
  return e;
}

inline CatalogEntry minimal_clifford_torus(int m, int n) { return clifford_torus(m, n, std::sqrt(double(m) / n)); }

/// √3(yz, xz, xy, (x²−y²)/2, (x²+y²−2z²)/(2√3)) on the unit S², a double
/// cover of the Veronese RP² ⊂ S⁴.
inline CatalogEntry veronese() {
  using namespace catalog_detail;
  Chart chart(sphere_axes(2, kLatitudeResolution, kLongitudeResolution, kPeriodicResolution));
  JetMap map = [](std::span<const Jet> a) {
    const auto u = unit_sphere(a);
    const Jet &x = u[0], &y = u[1], &z = u[2];
    const double s3 = std::sqrt(3.0);
    return std::vector<Jet>{s3 * (y * z), s3 * (x * z), s3 * (x * y), 0.5 * s3 * (x * x - y * y),
                            0.5 * (x * x + y * y - 2.0 * z * z)};
  };
  CatalogEntry e{"veronese", {}, Immersion::from_map("veronese", AmbientSpace::sphere(4), chart, map), {}};
  e.immersion.set_constant_mean_curvature(true).set_cover_factor(0.5);
  e.known.h = 0.0;
  e.known.alpha_sq = 4.0 / 3.0;
  e.known.scalar_curvature = 2.0 / 3.0;
  e.known.volume = 6.0 * std::numbers::pi;
  return e;
}

/// S^n ⊂ S^{n+p} as the first n+1 coordinates.
inline CatalogEntry equatorial_sphere(int n, int p) {
  using namespace catalog_detail;
  if (n < 2 || p < 1) throw ConfigError("equatorial sphere requires n >= 2, p >= 1");
  Chart chart(sphere_axes(n, latitude_resolution(n), longitude_resolution(n), kPeriodicResolution));
  JetMap map = [p](std::span<const Jet> a) {
    auto u = unit_sphere(a);
    for (int j = 0; j < p; ++j) u.emplace_back(0.0);
    return u;
  };
  std::ostringstream name;
  name << "equatorial_sphere(n=" << n << ",p=" << p << ")";
  CatalogEntry e{"equatorial_sphere", {{"n", n}, {"p", p}},
                 Immersion::from_map(name.str(), AmbientSpace::sphere(n + p), chart, map), {}};
  e.immersion.set_constant_mean_curvature(true);
  e.immersion.set_normal_frame([n, p](const ChartPoint&, int) {
    std::vector<std::vector<Jet>> frame;
    for (int j = 0; j < p; ++j) frame.push_back(as_jets(Eigen::VectorXd::Unit(n + p + 1, n + 1 + j)));
    return frame;
  });
  e.known.h = 0.0;
  e.known.alpha_sq = 0.0;
  e.known.principal_curvatures = std::vector<double>(static_cast<std::size_t>(n), 0.0);
  e.known.scalar_curvature = n * (n - 1);
  e.known.volume = sphere_volume(n);
  return e;
}

/// x ↦ (r·u, √(1−r²), 0, …) ⊂ S^{n+p}: umbilic, principal curvature
/// k = √(1−r²)/r.
inline CatalogEntry small_sphere(int n, double r, int p = 1) {
  using namespace catalog_detail;
  if (n < 2 || p < 1) throw ConfigError("small sphere requires n >= 2, p >= 1");
  if (!(r > 0 && r < 1)) throw ConfigError("small sphere requires 0 < r < 1");
  Chart chart(sphere_axes(n, latitude_resolution(n), longitude_resolution(n), kPeriodicResolution));
  const double z = std::sqrt(1.0 - r * r);
  JetMap map = [r, z, p](std::span<const Jet> a) {
    std::vector<Jet> f;
    for (auto& u : unit_sphere(a)) f.push_back(r * u);
    f.emplace_back(z);
    for (int j = 1; j < p; ++j) f.emplace_back(0.0);
    return f;
  };
  std::ostringstream name;
  name << "small_sphere(n=" << n << ",r=" << r << (p > 1 ? ",p=" + std::to_string(p) : "") << ")";
  CatalogEntry e{"small_sphere", {{"n", n}, {"r", r}, {"p", p}},
                 Immersion::from_map(name.str(), AmbientSpace::sphere(n + p), chart, map), {}};
  e.immersion.set_constant_mean_curvature(true);
  e.immersion.set_normal_frame([n, p, r, z](const ChartPoint& x, int order) {
    auto s = seed_jets(x, order);
    std::vector<Jet> N;
    for (auto& u : unit_sphere(s)) N.push_back(-z * u);
    N.emplace_back(r);
    for (int j = 1; j < p; ++j) N.emplace_back(0.0);
    std::vector<std::vector<Jet>> frame{N};
    for (int j = 1; j < p; ++j) frame.push_back(as_jets(Eigen::VectorXd::Unit(n + p + 1, n + 1 + j)));
    return frame;
  });
  const double k = z / r;
  e.known.principal_curvatures = std::vector<double>(static_cast<std::size_t>(n), k);
  e.known.h = n * k;
  e.known.alpha_sq = n * k * k;
  e.known.scalar_curvature = n * (n - 1) / (r * r);
  e.known.volume = sphere_volume(n, r);
  e.known.normal_conn_sq = 0.0;
  return e;
}

/// Umbilic hypersurface of H^{n+1} (hyperboloid model) with principal
/// curvature k: totally geodesic (k = 0), equidistant (0 < k < 1),
/// horosphere (k = 1), geodesic sphere (k > 1).  Non-compact cases use the
/// chart patch [−L, L]^n.
inline CatalogEntry hyperbolic_umbilic(int n, double k, double L = 1.0) {
  using namespace catalog_detail;
  if (n < 1) throw ConfigError("hyperbolic umbilic requires n >= 1");
  if (!(k >= 0)) throw ConfigError("hyperbolic umbilic requires k >= 0");
  const auto space = AmbientSpace::hyperbolic(n + 1);
  std::ostringstream name;
  name << "hyperbolic_umbilic(n=" << n << ",k=" << k << ")";
  std::optional<double> volume;
  auto build = [&]() -> Immersion {
    if (k > 1.0) {
      const double rho = std::atanh(1.0 / k);
      Chart chart(sphere_axes(n, latitude_resolution(n), longitude_resolution(n), kPeriodicResolution));
      JetMap map = [rho](std::span<const Jet> a) {
        std::vector<Jet> f{Jet(std::cosh(rho))};
        for (auto& u : unit_sphere(a)) f.push_back(std::sinh(rho) * u);
        return f;
      };
      volume = sphere_volume(n, std::sinh(rho));
      return Immersion::from_map(name.str(), space, chart, map);
    }
    Chart chart(std::vector<ChartAxis>(static_cast<std::size_t>(n), ChartAxis{-L, L, false, 16}));
    if (k == 1.0) {
      return Immersion::from_map(name.str(), space, chart, [](std::span<const Jet> y) {
        Jet s(0.0);
        for (const auto& yi : y) s += yi * yi;
        std::vector<Jet> f{1.0 + 0.5 * s};
        for (const auto& yi : y) f.push_back(yi);
        f.push_back(0.5 * s);
        return f;
      });
    }
    const double d = std::atanh(k);
    return Immersion::from_map(name.str(), space, chart, [d](std::span<const Jet> y) {
      Jet s(0.0);
      for (const auto& yi : y) s += yi * yi;
      std::vector<Jet> f{std::cosh(d) * sqrt(1.0 + s)};
      for (const auto& yi : y) f.push_back(std::cosh(d) * yi);
      f.emplace_back(std::sinh(d));
      return f;
    });
  };
  CatalogEntry e{"hyperbolic_umbilic", {{"n", n}, {"k", k}, {"L", L}}, build(), {}};
  e.known.volume = volume;
  e.immersion.set_constant_mean_curvature(true);
  e.known.principal_curvatures = std::vector<double>(static_cast<std::size_t>(n), k);
  e.known.h = n * k;
  e.known.alpha_sq = n * k * k;
  e.known.scalar_curvature = n * (n - 1) * (k * k - 1.0);
  e.known.normal_conn_sq = 0.0;
  return e;
}

/// (r1 e^{iu}, r2 e^{iv}, r3 e^{i(u+v)}) ⊂ S⁵: a flat torus whose mean
/// curvature vector is not parallel in the normal bundle.
inline CatalogEntry twisted_torus(double r1, double r2, double r3) {
  using namespace catalog_detail;
  if (!(r1 > 0 && r2 > 0 && r3 > 0) || std::abs(r1 * r1 + r2 * r2 + r3 * r3 - 1.0) > 1e-12)
    throw ConfigError("twisted torus requires positive radii with r1^2 + r2^2 + r3^2 = 1");
  Chart chart({{0.0, 2.0 * std::numbers::pi, true, kPeriodicResolution},
               {0.0, 2.0 * std::numbers::pi, true, kPeriodicResolution}});
  JetMap map = [r1, r2, r3](std::span<const Jet> x) {
    const Jet w = x[0] + x[1];
    return std::vector<Jet>{r1 * cos(x[0]), r1 * sin(x[0]), r2 * cos(x[1]), r2 * sin(x[1]), r3 * cos(w), r3 * sin(w)};
  };
  std::ostringstream name;
  name << "twisted_torus(r1=" << r1 << ",r2=" << r2 << ",r3=" << r3 << ")";
  CatalogEntry e{"twisted_torus", {{"r1", r1}, {"r2", r2}, {"r3", r3}},
                 Immersion::from_map(name.str(), AmbientSpace::sphere(5), chart, map), {}};
  e.immersion.set_constant_mean_curvature(true);
  const double guu = r1 * r1 + r3 * r3, gvv = r2 * r2 + r3 * r3, guv = r3 * r3;
  e.known.volume = 4.0 * std::numbers::pi * std::numbers::pi * std::sqrt(guu * gvv - guv * guv);
  return e;
}

// ---------------------------------------------------------------------------
// Listing and construction by name

inline std::vector<CatalogInfo> catalog_list() {
  return {
      {"clifford", "S^m(r1) x S^(n-m)(r2) in S^(n+1), r1^2 + r2^2 = 1",
       {{"m", "dimension of the first factor, 1 <= m < n", std::nullopt},
        {"n", "dimension of the torus", std::nullopt},
        {"r1", "radius of the first factor, defaults to sqrt(m/n) (minimal)", std::nullopt},
        {"r2", "radius of the second factor, defaults to sqrt(1 - r1^2)", std::nullopt}}},
      {"veronese", "minimal real projective plane in S^4 (double cover of S^2)", {}},
      {"equatorial_sphere", "totally geodesic S^n in S^(n+p)",
       {{"n", "dimension", std::nullopt}, {"p", "codimension", 1.0}}},
      {"small_sphere", "umbilic S^n(r) in S^(n+p)",
       {{"n", "dimension", std::nullopt}, {"r", "radius, 0 < r < 1", std::nullopt}, {"p", "codimension", 1.0}}},
      {"hyperbolic_umbilic", "umbilic hypersurface of H^(n+1) with principal curvature k >= 0",
       {{"n", "dimension", std::nullopt},
        {"k", "principal curvature", std::nullopt},
        {"L", "half-width of the chart patch for k <= 1", 1.0}}},
      {"twisted_torus", "flat torus (r1 e^iu, r2 e^iv, r3 e^i(u+v)) in S^5",
       {{"r1", "radius", 0.6}, {"r2", "radius", 0.6}, {"r3", "radius, defaults to sqrt(1 - r1^2 - r2^2)", std::nullopt}}},
  };
}

struct CatalogSpec {
  std::string type;
  std::map<std::string, double> params;
};

inline CatalogEntry build_catalog_entry(const CatalogSpec& spec) {
  using catalog_detail::require_int;
  const auto infos = catalog_list();
  auto info = std::find_if(infos.begin(), infos.end(), [&](const CatalogInfo& i) { return i.name == spec.type; });
  if (info == infos.end()) throw ConfigError("unknown catalog entry '" + spec.type + "'");
  for (const auto& [key, value] : spec.params) {
    if (std::none_of(info->params.begin(), info->params.end(), [&](const ParamInfo& p) { return p.name == key; }))
      throw ConfigError("unknown parameter '" + key + "' for " + spec.type);
  }
  auto get = [&](const std::string& key) -> std::optional<double> {
    auto it = spec.params.find(key);
    if (it != spec.params.end()) return it->second;
    for (const auto& p : info->params)
      if (p.name == key) return p.default_value;
    return std::nullopt;
  };
  auto need = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("missing parameter '" + key + "' for " + spec.type);
    return *v;
  };
  if (spec.type == "clifford") {
    const int m = require_int(need("m"), "m"), n = require_int(need("n"), "n");
    const double r1 = get("r1").value_or(std::sqrt(double(m) / std::max(n, 1)));
    return clifford_torus(m, n, r1, get("r2"));
  }
  if (spec.type == "veronese") return veronese();
  if (spec.type == "equatorial_sphere") return equatorial_sphere(require_int(need("n"), "n"), require_int(need("p"), "p"));
  if (spec.type == "small_sphere")
    return small_sphere(require_int(need("n"), "n"), need("r"), require_int(need("p"), "p"));
  if (spec.type == "hyperbolic_umbilic") return hyperbolic_umbilic(require_int(need("n"), "n"), need("k"), need("L"));
  if (spec.type == "twisted_torus") {
    const double r1 = need("r1"), r2 = need("r2");
    const double r3 = get("r3").value_or(std::sqrt(std::max(0.0, 1.0 - r1 * r1 - r2 * r2)));
    return twisted_torus(r1, r2, r3);
  }
  throw ConfigError("unknown catalog entry '" + spec.type + "'");
}

/// Parses "name" or "name(key=value,...)".
inline CatalogSpec parse_catalog_spec(const std::string& text) {
  CatalogSpec spec;
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  const auto open = s.find('(');
  spec.type = s.substr(0, open);
  if (spec.type.empty()) throw ConfigError("empty immersion spec");
  if (open == std::string::npos) return spec;
  if (s.back() != ')') throw ConfigError("immersion spec missing ')': " + text);
  const std::string body = s.substr(open + 1, s.size() - open - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in immersion spec: " + item);
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty()) throw ConfigError("bad number '" + val + "' for " + key);
    if (spec.params.count(key)) throw ConfigError("duplicate parameter '" + key + "'");
    spec.params[key] = v;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Self-validation

struct ValidationReport {
  int points = 0;
  double alpha_sq_defect = 0.0;
  double h_defect = 0.0;
  double principal_defect = 0.0;
  double scalar_defect = 0.0;
  double normal_conn_defect = 0.0;
  double max_defect = 0.0;
  bool passed = true;
};

/// Compares every known pointwise value with the computed one at `points`
/// seeded random chart points.
inline ValidationReport validate_entry(const CatalogEntry& e, int points = 20, unsigned seed = 20240601u,
                                       double tol = 1e-7) {
  ValidationReport rep;
  rep.points = points;
  std::mt19937_64 rng(seed);
  const double c = e.immersion.ambient().curvature();
  for (int i = 0; i < points; ++i) {
    const ChartPoint x = e.immersion.chart().sample(rng, 0.05);
    const ShapeData sd = local_shape(e.immersion, x);
    if (e.known.alpha_sq) rep.alpha_sq_defect = std::max(rep.alpha_sq_defect, std::abs(sd.alpha_sq - *e.known.alpha_sq));
    if (e.known.h) rep.h_defect = std::max(rep.h_defect, std::abs(sd.mean_curvature - *e.known.h));
    if (e.known.scalar_curvature)
      rep.scalar_defect = std::max(rep.scalar_defect, std::abs(scalar_curvature(sd, c) - *e.known.scalar_curvature));
    if (e.known.principal_curvatures && sd.p() >= 1) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sd.h_coeffs[0]);
      std::vector<double> got(eig.eigenvalues().data(), eig.eigenvalues().data() + sd.n());
      std::vector<double> want = *e.known.principal_curvatures, neg;
      for (double v : want) neg.push_back(-v);
      std::sort(want.begin(), want.end());
      std::sort(neg.begin(), neg.end());
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t k = 0; k < got.size(); ++k) {
        d1 = std::max(d1, std::abs(got[k] - want[k]));
        d2 = std::max(d2, std::abs(got[k] - neg[k]));
      }
      rep.principal_defect = std::max(rep.principal_defect, std::min(d1, d2));
    }
    if (e.known.normal_conn_sq && sd.h_adapted) {
      try {
        rep.normal_conn_defect =
            std::max(rep.normal_conn_defect, std::abs(normal_connection_sq(e.immersion, sd) - *e.known.normal_conn_sq));
      } catch (const NumericalError&) {
      }
    }
  }
  rep.max_defect = std::max({rep.alpha_sq_defect, rep.h_defect, rep.principal_defect, rep.scalar_defect,
                             rep.normal_conn_defect});
  rep.passed = rep.max_defect <= tol;
  return rep;
}

/// Builds an entry and rejects it unless its known values are reproduced.
inline CatalogEntry load_catalog_entry(const CatalogSpec& spec) {
  CatalogEntry e = build_catalog_entry(spec);
  const ValidationReport rep = validate_entry(e);
  if (!rep.passed)
    throw NumericalError("catalog self-validation failed for " + e.immersion.name() +
                         " (max defect " + std::to_string(rep.max_defect) + ")");
  return e;
}

}  // namespace spaceform
