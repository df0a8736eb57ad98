#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet stores the Taylor coefficients c_α = ∂^α f(x₀)/α! of a scalar
// function of `nvars` variables up to total degree `order`.  Arithmetic and
// elementary functions propagate the truncated expansion exactly, so a map
// written once against Jet yields all its partial derivatives up to the
// requested order with no finite differencing.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace spaceform {

class JetLayout {
 public:
  static constexpr int kMaxVars = 8;
  static constexpr int kMaxOrder = 6;

  struct Product {
    std::uint32_t a, b, out;
  };
  struct DerivTerm {
    std::uint32_t src, dst;
    double factor;
  };

  /// Shared, immutable layout for the given shape.  Thread-safe.
  static const JetLayout& get(int nvars, int order) {
    if (nvars < 0 || nvars > kMaxVars || order < 0 || order > kMaxOrder) {
      throw std::invalid_argument("jet layout out of range");
    }
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot.reset(new JetLayout(nvars, order));
    return *slot;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }
  const std::vector<int>& exponents(std::size_t k) const { return exps_[k]; }
  int degree(std::size_t k) const { return degree_[k]; }

  /// Number of monomials of total degree ≤ d; monomials are graded, so this
  /// is also the prefix length of any higher-order layout.
  std::size_t count_up_to(int d) const { return prefix_[static_cast<std::size_t>(std::min(d, order_)) + 1]; }

  std::size_t index(std::span<const int> alpha) const {
    auto it = lookup_.find(std::vector<int>(alpha.begin(), alpha.end()));
    if (it == lookup_.end()) throw std::out_of_range("monomial not in jet layout");
    return it->second;
  }

  const std::vector<Product>& products() const { return products_; }

  /// Terms of ∂/∂x_var, mapping into the layout of order-1.
  const std::vector<DerivTerm>& derivative(int var) const { return deriv_[static_cast<std::size_t>(var)]; }

  /// α! for monomial k.
  double factorial(std::size_t k) const { return factorial_[k]; }

 private:
  JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    prefix_.push_back(0);
    for (int d = 0; d <= order; ++d) {
      std::vector<int> alpha(static_cast<std::size_t>(nvars), 0);
      enumerate(d, 0, alpha);
      prefix_.push_back(exps_.size());
    }
    for (std::size_t k = 0; k < exps_.size(); ++k) {
      lookup_[exps_[k]] = k;
      double f = 1.0;
      for (int e : exps_[k])
        for (int i = 2; i <= e; ++i) f *= i;
      factorial_.push_back(f);
    }
    for (std::size_t a = 0; a < exps_.size(); ++a) {
      for (std::size_t b = 0; b < exps_.size(); ++b) {
        if (degree_[a] + degree_[b] > order) continue;
        std::vector<int> sum(exps_[a]);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += exps_[b][i];
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(lookup_.at(sum))});
      }
    }
    deriv_.resize(static_cast<std::size_t>(nvars));
    if (order > 0) {
      // Lower-order layout shares the graded prefix, so indices carry over.
      for (int v = 0; v < nvars; ++v) {
        for (std::size_t k = 0; k < exps_.size(); ++k) {
          const int e = exps_[k][static_cast<std::size_t>(v)];
          if (e == 0) continue;
          std::vector<int> lower(exps_[k]);
          lower[static_cast<std::size_t>(v)] -= 1;
          deriv_[static_cast<std::size_t>(v)].push_back(
              {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(lookup_.at(lower)), double(e)});
        }
      }
    }
  }

  void enumerate(int remaining, std::size_t var, std::vector<int>& alpha) {
    if (var + 1 >= alpha.size()) {
      if (alpha.empty()) {
        if (remaining == 0) push(alpha);
        return;
      }
      alpha[var] = remaining;
      push(alpha);
      alpha[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      alpha[var] = e;
      enumerate(remaining - e, var + 1, alpha);
    }
    alpha[var] = 0;
  }

  void push(const std::vector<int>& alpha) {
    exps_.push_back(alpha);
    int d = 0;
    for (int e : alpha) d += e;
    degree_.push_back(d);
  }

  int nvars_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> prefix_;
  std::vector<double> factorial_;
  std::map<std::vector<int>, std::size_t> lookup_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivTerm>> deriv_;
};

class Jet {
 public:
  using Coeffs = boost::container::small_vector<double, 16>;

  /// A pure constant; combines with any layout.
  Jet(double value = 0.0) : layout_(&scalar_layout()), c_{value} {}  // NOLINT(implicit)

  Jet(const JetLayout& layout, double value) : layout_(&layout), c_(layout.size(), 0.0) { c_[0] = value; }

  /// The coordinate function x_var expanded at `value`.
  static Jet variable(const JetLayout& layout, int var, double value) {
    Jet j(layout, value);
    if (layout.order() >= 1) {
      std::array<int, JetLayout::kMaxVars> alpha{};
      alpha[static_cast<std::size_t>(var)] = 1;
      j.c_[layout.index(std::span<const int>(alpha.data(), static_cast<std::size_t>(layout.nvars())))] = 1.0;
    }
    return j;
  }

  static const JetLayout& scalar_layout() {
    static const JetLayout& layout = JetLayout::get(0, 0);
    return layout;
  }

  const JetLayout& layout() const { return *layout_; }
  bool is_scalar() const { return layout_->nvars() == 0; }
  double value() const { return c_[0]; }
  double coeff(std::size_t k) const { return c_[k]; }
  double& coeff(std::size_t k) { return c_[k]; }
  std::size_t size() const { return c_.size(); }

  /// ∂^α f at the expansion point.  Zero beyond the stored order.
  double partial(std::span<const int> alpha) const {
    int d = 0;
    for (int e : alpha) d += e;
    if (d > layout_->order()) return 0.0;
    const std::size_t k = layout_->index(alpha);
    return c_[k] * layout_->factorial(k);
  }

  Jet differentiate(int var) const {
    if (is_scalar() || layout_->order() == 0) return Jet(JetLayout::get(layout_->nvars(), 0), 0.0);
    Jet out(JetLayout::get(layout_->nvars(), layout_->order() - 1), 0.0);
    out.c_[0] = 0.0;
    for (const auto& t : layout_->derivative(var)) out.c_[t.dst] += t.factor * c_[t.src];
    return out;
  }

  Jet truncate(int order) const {
    if (is_scalar() || order >= layout_->order()) return *this;
    const auto& lower = JetLayout::get(layout_->nvars(), order);
    Jet out(lower, 0.0);
    std::copy_n(c_.begin(), lower.size(), out.c_.begin());
    return out;
  }

  Jet operator-() const {
    Jet r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    if (o.is_scalar()) {
      c_[0] += o.c_[0];
      return *this;
    }
    promote_to(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    if (o.is_scalar()) {
      c_[0] -= o.c_[0];
      return *this;
    }
    promote_to(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) {
    a.c_[0] += b;
    return a;
  }
  friend Jet operator+(double b, Jet a) { return a + b; }
  friend Jet operator-(Jet a, double b) {
    a.c_[0] -= b;
    return a;
  }
  friend Jet operator-(double b, const Jet& a) { return (-a) + b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_scalar()) return b * a.c_[0];
    if (b.is_scalar()) return a * b.c_[0];
    check_same(a, b);
    Jet r(*a.layout_, 0.0);
    for (const auto& p : a.layout_->products()) r.c_[p.out] += a.c_[p.a] * b.c_[p.b];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_scalar()) return a / b.c_[0];
    return a * reciprocal(b);
  }

  /// f(a) from the Taylor coefficients t_k = f^{(k)}(a₀)/k! of f at a₀.
  static Jet compose(const Jet& a, std::span<const double> t) {
    if (a.is_scalar()) return Jet(t[0]);
    Jet delta(a);
    delta.c_[0] = 0.0;
    const int order = a.layout_->order();
    Jet r(*a.layout_, t[static_cast<std::size_t>(order)]);
    for (int k = order - 1; k >= 0; --k) {
      r = r * delta;
      r.c_[0] += t[static_cast<std::size_t>(k)];
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const double x = a.value();
    std::array<double, JetLayout::kMaxOrder + 1> t{};
    double p = 1.0 / x;
    for (int k = 0; k <= a.layout_->order(); ++k) {
      t[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * p;
      p /= x;
    }
    return compose(a, t);
  }

 private:
  void promote_to(const Jet& o) {
    if (is_scalar() && !o.is_scalar()) {
      const double v = c_[0];
      layout_ = o.layout_;
      c_.assign(o.c_.size(), 0.0);
      c_[0] = v;
      return;
    }
    check_same(*this, o);
  }

  static void check_same(const Jet& a, const Jet& b) {
    if (a.layout_ != b.layout_) throw std::logic_error("jet layout mismatch");
  }

  const JetLayout* layout_;
  Coeffs c_;
};

namespace jet_detail {
inline std::array<double, JetLayout::kMaxOrder + 1> taylor_buffer() { return {}; }
inline double inv_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return 1.0 / f;
}
}  // namespace jet_detail

inline Jet sin(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  for (int k = 0; k <= a.layout().order(); ++k)
    t[static_cast<std::size_t>(k)] = std::sin(a.value() + k * std::numbers::pi / 2) * jet_detail::inv_factorial(k);
  return Jet::compose(a, t);
}

inline Jet cos(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  for (int k = 0; k <= a.layout().order(); ++k)
    t[static_cast<std::size_t>(k)] = std::cos(a.value() + k * std::numbers::pi / 2) * jet_detail::inv_factorial(k);
  return Jet::compose(a, t);
}

inline Jet tan(const Jet& a) { return sin(a) / cos(a); }

inline Jet exp(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  const double e = std::exp(a.value());
  for (int k = 0; k <= a.layout().order(); ++k) t[static_cast<std::size_t>(k)] = e * jet_detail::inv_factorial(k);
  return Jet::compose(a, t);
}

inline Jet sinh(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  for (int k = 0; k <= a.layout().order(); ++k)
    t[static_cast<std::size_t>(k)] =
        (k % 2 == 0 ? std::sinh(a.value()) : std::cosh(a.value())) * jet_detail::inv_factorial(k);
  return Jet::compose(a, t);
}

inline Jet cosh(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  for (int k = 0; k <= a.layout().order(); ++k)
    t[static_cast<std::size_t>(k)] =
        (k % 2 == 0 ? std::cosh(a.value()) : std::sinh(a.value())) * jet_detail::inv_factorial(k);
  return Jet::compose(a, t);
}

inline Jet log(const Jet& a) {
  auto t = jet_detail::taylor_buffer();
  const double x = a.value();
  t[0] = std::log(x);
  double p = 1.0;
  for (int k = 1; k <= a.layout().order(); ++k) {
    p /= x;
    t[static_cast<std::size_t>(k)] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
  }
  return Jet::compose(a, t);
}

/// a^e for real e; generalized binomial series at a₀ (a₀ > 0 unless e is a
/// non-negative integer).
inline Jet pow(const Jet& a, double e) {
  auto t = jet_detail::taylor_buffer();
  const double x = a.value();
  double binom = 1.0;
  for (int k = 0; k <= a.layout().order(); ++k) {
    t[static_cast<std::size_t>(k)] = binom * std::pow(x, e - k);
    binom *= (e - k) / (k + 1);
  }
  return Jet::compose(a, t);
}

inline Jet sqrt(const Jet& a) { return pow(a, 0.5); }

inline Jet atan(const Jet& a) {
  // d/dx atan = 1/(1+x²); integrate the series of the derivative term by term
  // by composing through a jet in a single auxiliary variable.
  const int order = a.layout().order();
  if (a.is_scalar() || order == 0) return Jet::compose(a, std::array<double, 1>{std::atan(a.value())});
  const auto& one = JetLayout::get(1, order - 1);
  Jet x = Jet::variable(one, 0, a.value());
  Jet d = reciprocal(1.0 + x * x);
  auto t = jet_detail::taylor_buffer();
  t[0] = std::atan(a.value());
  for (int k = 1; k <= order; ++k) t[static_cast<std::size_t>(k)] = d.coeff(static_cast<std::size_t>(k - 1)) / k;
  return Jet::compose(a, t);
}

inline Jet square(const Jet& a) { return a * a; }

}  // namespace spaceform
