#pragma once

// Inline parametrizations: arithmetic expressions in the chart variables,
// parsed once and evaluated over jets so that derivatives stay analytic.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spaceform/ambient.hpp"
#include "spaceform/error.hpp"
#include "spaceform/immersion.hpp"
#include "spaceform/jet.hpp"

namespace spaceform {

class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text, const std::vector<std::string>& variables,
                          const std::map<std::string, double>& constants = {}) {
    Parser p{text, 0, variables, constants};
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = text;
    return e;
  }

  Jet eval(std::span<const Jet> vars) const { return eval(*root_, vars); }
  double eval(const std::vector<double>& vars) const {
    std::vector<Jet> v(vars.begin(), vars.end());
    return eval(*root_, v).value();
  }
  const std::string& text() const { return text_; }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = -1;
    std::string fn;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static Jet call(const std::string& fn, const Jet& x) {
    if (fn == "sin") return sin(x);
    if (fn == "cos") return cos(x);
    if (fn == "tan") return tan(x);
    if (fn == "exp") return exp(x);
    if (fn == "log") return log(x);
    if (fn == "sqrt") return sqrt(x);
    if (fn == "sinh") return sinh(x);
    if (fn == "cosh") return cosh(x);
    if (fn == "atan") return atan(x);
    throw ConfigError("unknown function '" + fn + "'");
  }

  static Jet eval(const Node& n, std::span<const Jet> vars) {
    switch (n.op) {
      case Op::Const:
        return Jet(n.value);
      case Op::Var:
        return vars[static_cast<std::size_t>(n.var)];
      case Op::Add:
        return eval(*n.a, vars) + eval(*n.b, vars);
      case Op::Sub:
        return eval(*n.a, vars) - eval(*n.b, vars);
      case Op::Mul:
        return eval(*n.a, vars) * eval(*n.b, vars);
      case Op::Div:
        return eval(*n.a, vars) / eval(*n.b, vars);
      case Op::Neg:
        return -eval(*n.a, vars);
      case Op::Call:
        return call(n.fn, eval(*n.a, vars));
      case Op::Pow: {
        const Jet base = eval(*n.a, vars);
        if (n.b->op == Op::Const && std::abs(n.b->value - std::round(n.b->value)) < 1e-15 &&
            std::abs(n.b->value) <= 16) {
          const int k = static_cast<int>(std::lround(n.b->value));
          Jet r(1.0);
          for (int i = 0; i < std::abs(k); ++i) r = r * base;
          return k < 0 ? 1.0 / r : r;
        }
        const Jet e = eval(*n.b, vars);
        return exp(e * log(base));
      }
    }
    return Jet(0.0);
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;
    const std::vector<std::string>& vars;
    const std::map<std::string, double>& consts;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ConfigError("expression '" + s + "' at position " + std::to_string(pos) + ": " + msg);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
      auto n = std::make_shared<Node>();
      n->op = op;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
    NodePtr expr() {
      NodePtr left = term();
      for (;;) {
        if (eat('+'))
          left = make(Op::Add, left, term());
        else if (eat('-'))
          left = make(Op::Sub, left, term());
        else
          return left;
      }
    }
    NodePtr term() {
      NodePtr left = unary();
      for (;;) {
        if (eat('*'))
          left = make(Op::Mul, left, unary());
        else if (eat('/'))
          left = make(Op::Div, left, unary());
        else
          return left;
      }
    }
    NodePtr unary() {
      if (eat('-')) return make(Op::Neg, unary());
      if (eat('+')) return unary();
      return power();
    }
    NodePtr power() {
      NodePtr base = atom();
      if (eat('^')) return make(Op::Pow, base, unary());
      return base;
    }
    NodePtr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      if (eat('(')) {
        NodePtr e = expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        const double v = std::stod(s.substr(pos), &used);
        pos += used;
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (eat('(')) {
          auto n = std::make_shared<Node>();
          n->op = Op::Call;
          n->fn = name;
          call(name, Jet(0.5));  // rejects unknown names at parse time
          n->a = expr();
          if (!eat(')')) fail("expected ')' after function argument");
          return n;
        }
        for (std::size_t i = 0; i < vars.size(); ++i)
          if (vars[i] == name) {
            auto n = std::make_shared<Node>();
            n->op = Op::Var;
            n->var = static_cast<int>(i);
            return n;
          }
        auto n = std::make_shared<Node>();
        if (auto it = consts.find(name); it != consts.end())
          n->value = it->second;
        else if (name == "pi")
          n->value = std::numbers::pi;
        else
          fail("unknown name '" + name + "'");
        return n;
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  NodePtr root_;
  std::string text_;
};

struct InlineSpec {
  std::string name = "inline";
  Model model = Model::SphereInFlat;
  int ambient_dim = 3;
  double curvature = 1.0;
  std::vector<std::string> variables;
  std::vector<ChartAxis> axes;
  /// One expression per flat coordinate.
  std::vector<std::string> components;
  std::map<std::string, double> constants;
  /// Retract the evaluated point onto the model (otherwise it must lie on it).
  bool retract = false;
  bool constant_h = false;
  double cover_factor = 1.0;
};

inline Immersion inline_immersion(const InlineSpec& spec) {
  if (spec.variables.size() != spec.axes.size()) throw ConfigError("inline immersion needs one chart axis per variable");
  AmbientSpace space = spec.model == Model::SphereInFlat ? AmbientSpace::sphere(spec.ambient_dim, spec.curvature)
                       : spec.model == Model::Euclidean ? AmbientSpace::euclidean(spec.ambient_dim)
                                                        : AmbientSpace::hyperbolic(spec.ambient_dim, spec.curvature);
  if (static_cast<int>(spec.components.size()) != space.flat_dim())
    throw ConfigError("inline immersion needs " + std::to_string(space.flat_dim()) + " component expressions");
  std::vector<Expression> exprs;
  for (const auto& c : spec.components) exprs.push_back(Expression::parse(c, spec.variables, spec.constants));
  const bool retract = spec.retract;
  JetMap map = [exprs, space, retract](std::span<const Jet> x) {
    std::vector<Jet> f;
    for (const auto& e : exprs) f.push_back(e.eval(x));
    return retract ? space.retract(f) : f;
  };
  Immersion imm = Immersion::from_map(spec.name, space, Chart(spec.axes), map);
  imm.set_constant_mean_curvature(spec.constant_h).set_cover_factor(spec.cover_factor);
  return imm;
}

}  // namespace spaceform
