#pragma once

// Chart-parametrized immersions into an ambient model.  The map is evaluated
// in jet arithmetic so that every partial derivative up to order 4 (and one
// more internally, for deformation families) is exact up to rounding.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spaceform/ambient.hpp"
#include "spaceform/error.hpp"
#include "spaceform/jet.hpp"

namespace spaceform {

using ChartPoint = Eigen::VectorXd;

struct ChartAxis {
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  bool periodic = true;
  int default_resolution = 64;

  double length() const { return hi - lo; }
};

inline std::string format_point(const ChartPoint& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<ChartAxis> axes) : axes_(std::move(axes)) {}

  int dim() const { return static_cast<int>(axes_.size()); }
  const ChartAxis& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  const std::vector<ChartAxis>& axes() const { return axes_; }

  ChartPoint wrap(ChartPoint x) const {
    for (int i = 0; i < dim(); ++i) {
      const auto& a = axis(i);
      if (!a.periodic) continue;
      const double t = std::fmod(x[i] - a.lo, a.length());
      x[i] = a.lo + (t < 0 ? t + a.length() : t);
    }
    return x;
  }

  bool contains(const ChartPoint& x) const {
    for (int i = 0; i < dim(); ++i) {
      const auto& a = axis(i);
      if (!a.periodic && (x[i] < a.lo || x[i] > a.hi)) return false;
    }
    return true;
  }

  /// Throws "boundary stencil" if a centered stencil of the given radius
  /// leaves a non-periodic axis.
  void require_stencil(const ChartPoint& x, double radius) const {
    for (int i = 0; i < dim(); ++i) {
      const auto& a = axis(i);
      if (!a.periodic && (x[i] - radius < a.lo || x[i] + radius > a.hi))
        throw NumericalError("boundary stencil (axis " + std::to_string(i) + ")");
    }
  }

  /// Shrinks a finite-difference step so that a stencil of radius
  /// factor·step stays inside the chart; fails below 1e-6.
  double fit_step(const ChartPoint& x, double step, double factor) const {
    double room = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) {
      const auto& a = axis(i);
      if (!a.periodic) room = std::min({room, x[i] - a.lo, a.hi - x[i]});
    }
    const double fitted = std::min(step, 0.999 * room / factor);
    if (fitted < 1e-6) throw NumericalError("boundary stencil at x = " + format_point(x));
    return fitted;
  }

  /// Uniform sample, keeping a relative margin away from non-periodic ends.
  template <class Rng>
  ChartPoint sample(Rng& rng, double margin = 0.05) const {
    ChartPoint x(dim());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < dim(); ++i) {
      const auto& a = axis(i);
      const double m = a.periodic ? 0.0 : margin;
      x[i] = a.lo + a.length() * (m + (1.0 - 2.0 * m) * u(rng));
    }
    return x;
  }

 private:
  std::vector<ChartAxis> axes_;
};

/// Jets of the flat-coordinate components of a map at one chart point.
class MapJet {
 public:
  MapJet(std::vector<Jet> comps, int nvars) : comps_(std::move(comps)), nvars_(nvars) {}

  int order() const { return comps_.front().layout().order(); }
  int nvars() const { return nvars_; }
  int flat_dim() const { return static_cast<int>(comps_.size()); }
  const std::vector<Jet>& components() const { return comps_; }

  Eigen::VectorXd partial(std::span<const int> alpha) const {
    Eigen::VectorXd v(flat_dim());
    for (int k = 0; k < flat_dim(); ++k) v[k] = comps_[static_cast<std::size_t>(k)].partial(alpha);
    return v;
  }

  Eigen::VectorXd value() const {
    Eigen::VectorXd v(flat_dim());
    for (int k = 0; k < flat_dim(); ++k) v[k] = comps_[static_cast<std::size_t>(k)].value();
    return v;
  }

  Eigen::VectorXd d1(int i) const {
    std::vector<int> a(static_cast<std::size_t>(nvars_), 0);
    a[static_cast<std::size_t>(i)] += 1;
    return partial(a);
  }

  Eigen::VectorXd d2(int i, int j) const {
    std::vector<int> a(static_cast<std::size_t>(nvars_), 0);
    a[static_cast<std::size_t>(i)] += 1;
    a[static_cast<std::size_t>(j)] += 1;
    return partial(a);
  }

  Eigen::VectorXd d3(int i, int j, int k) const {
    std::vector<int> a(static_cast<std::size_t>(nvars_), 0);
    a[static_cast<std::size_t>(i)] += 1;
    a[static_cast<std::size_t>(j)] += 1;
    a[static_cast<std::size_t>(k)] += 1;
    return partial(a);
  }

 private:
  std::vector<Jet> comps_;
  int nvars_;
};

/// Identity jets x_i = x0_i + ε_i.
inline std::vector<Jet> seed_jets(const ChartPoint& x, int order) {
  const auto& layout = JetLayout::get(static_cast<int>(x.size()), order);
  std::vector<Jet> v;
  v.reserve(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i) v.push_back(Jet::variable(layout, i, x[i]));
  return v;
}

using JetMap = std::function<std::vector<Jet>(std::span<const Jet>)>;
using JetEvaluator = std::function<std::vector<Jet>(const ChartPoint&, int)>;
/// p normal vector fields as flat-coordinate jets.
using FrameEvaluator = std::function<std::vector<std::vector<Jet>>(const ChartPoint&, int)>;

class Immersion {
 public:
  Immersion(std::string name, AmbientSpace ambient, Chart chart, JetEvaluator evaluator)
      : name_(std::move(name)), ambient_(ambient), chart_(std::move(chart)), eval_(std::move(evaluator)) {
    const int n = chart_.dim();
    const bool hyperbolic = ambient_.model() == Model::HyperboloidInMinkowski;
    if (n < (hyperbolic ? 1 : 2) || n > ambient_.dim() - 1)
      throw ConfigError("immersion requires 2 <= n <= dim-1 (n = 1 only in hyperbolic space)");
  }

  static Immersion from_map(std::string name, AmbientSpace ambient, Chart chart, JetMap map) {
    JetEvaluator eval = [map = std::move(map)](const ChartPoint& x, int order) { return map(seed_jets(x, order)); };
    return Immersion(std::move(name), ambient, std::move(chart), std::move(eval));
  }

  const std::string& name() const { return name_; }
  const AmbientSpace& ambient() const { return ambient_; }
  const Chart& chart() const { return chart_; }
  int domain_dim() const { return chart_.dim(); }
  int codim() const { return ambient_.dim() - chart_.dim(); }
  int flat_dim() const { return ambient_.flat_dim(); }

  /// Unvalidated jets of order 0..kMaxOrder.
  std::vector<Jet> raw_jets(const ChartPoint& x, int order) const {
    auto v = eval_(x, order);
    if (static_cast<int>(v.size()) != flat_dim()) throw ConfigError("map returned wrong flat dimension");
    return v;
  }

  /// Mixed partials of the map up to `order` (1..4), checked against the model.
  MapJet jet(const ChartPoint& x, int order) const {
    if (order < 0 || order > 4) throw ConfigError("jet order must be in 0..4");
    return checked_jet(x, order);
  }

  MapJet checked_jet(const ChartPoint& x, int order) const {
    MapJet j(raw_jets(x, order), domain_dim());
    ambient_.validate_point(j.value());
    return j;
  }

  Eigen::VectorXd point(const ChartPoint& x) const { return checked_jet(x, 0).value(); }

  const std::optional<FrameEvaluator>& normal_frame() const { return normal_frame_; }
  Immersion& set_normal_frame(FrameEvaluator f) {
    normal_frame_ = std::move(f);
    return *this;
  }

  /// Mean curvature function known to be constant (Δh is then exactly 0).
  bool constant_mean_curvature() const { return constant_h_; }
  Immersion& set_constant_mean_curvature(bool v) {
    constant_h_ = v;
    return *this;
  }

  /// Integrals over the chart are multiplied by this (½ for a double cover).
  double cover_factor() const { return cover_; }
  Immersion& set_cover_factor(double f) {
    cover_ = f;
    return *this;
  }

 private:
  std::string name_;
  AmbientSpace ambient_;
  Chart chart_;
  JetEvaluator eval_;
  std::optional<FrameEvaluator> normal_frame_;
  bool constant_h_ = false;
  double cover_ = 1.0;
};

}  // namespace spaceform
