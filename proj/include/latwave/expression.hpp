#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "latwave/errors.hpp"

namespace latwave {

/// Compiled scalar expression in one free variable.
///
/// Grammar (used for custom potentials and initial-data formulas):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('+'|'-')* power
///   power  := primary ('^' factor)?          (right associative)
///   primary:= number | name | name '(' expr ')' | '(' expr ')'
///
/// Names: the free variable (accepted spellings: x, xi, zeta, u),
/// constants pi and e, functions exp, sin, cos, arctan (alias atan), erf.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(double x) const { return eval(root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op {
    constant,
    variable,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    f_exp,
    f_sin,
    f_cos,
    f_atan,
    f_erf
  };

  struct Node {
    Op op;
    double value = 0.0;  // for constant
    int lhs = -1;
    int rhs = -1;
  };

  double eval(int idx, double x) const {
    const Node& n = nodes_[idx];
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::variable: return x;
      case Op::add: return eval(n.lhs, x) + eval(n.rhs, x);
      case Op::sub: return eval(n.lhs, x) - eval(n.rhs, x);
      case Op::mul: return eval(n.lhs, x) * eval(n.rhs, x);
      case Op::div: return eval(n.lhs, x) / eval(n.rhs, x);
      case Op::pow: return std::pow(eval(n.lhs, x), eval(n.rhs, x));
      case Op::neg: return -eval(n.lhs, x);
      case Op::f_exp: return std::exp(eval(n.lhs, x));
      case Op::f_sin: return std::sin(eval(n.lhs, x));
      case Op::f_cos: return std::cos(eval(n.lhs, x));
      case Op::f_atan: return std::atan(eval(n.lhs, x));
      case Op::f_erf: return std::erf(eval(n.lhs, x));
    }
    return 0.0;  // unreachable
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string text_;

  // -- parser --
  struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    Expression& out;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ParseError("expression error at position " + std::to_string(pos) +
                       ": " + msg + " in \"" + s + "\"");
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    int push(Expression::Node n) {
      out.nodes_.push_back(n);
      return static_cast<int>(out.nodes_.size()) - 1;
    }

    int parse_expr() {
      int lhs = parse_term();
      for (;;) {
        if (eat('+'))
          lhs = push({Op::add, 0.0, lhs, parse_term()});
        else if (eat('-'))
          lhs = push({Op::sub, 0.0, lhs, parse_term()});
        else
          return lhs;
      }
    }
    int parse_term() {
      int lhs = parse_factor();
      for (;;) {
        if (eat('*'))
          lhs = push({Op::mul, 0.0, lhs, parse_factor()});
        else if (eat('/'))
          lhs = push({Op::div, 0.0, lhs, parse_factor()});
        else
          return lhs;
      }
    }
    int parse_factor() {
      if (eat('-')) return push({Op::neg, 0.0, parse_factor(), -1});
      if (eat('+')) return parse_factor();
      int base = parse_primary();
      if (eat('^')) return push({Op::pow, 0.0, base, parse_factor()});
      return base;
    }
    int parse_primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
      if (eat('(')) {
        int e = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    int parse_number() {
      std::size_t end = 0;
      double v = 0.0;
      try {
        v = std::stod(s.substr(pos), &end);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos += end;
      return push({Op::constant, v, -1, -1});
    }
    int parse_name() {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      if (name == "pi") return push({Op::constant, std::numbers::pi, -1, -1});
      if (name == "e") return push({Op::constant, std::numbers::e, -1, -1});
      if (name == "x" || name == "xi" || name == "zeta" || name == "u")
        return push({Op::variable, 0.0, -1, -1});
      Op fn;
      if (name == "exp")
        fn = Op::f_exp;
      else if (name == "sin")
        fn = Op::f_sin;
      else if (name == "cos")
        fn = Op::f_cos;
      else if (name == "arctan" || name == "atan")
        fn = Op::f_atan;
      else if (name == "erf")
        fn = Op::f_erf;
      else
        fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after function '" + name + "'");
      int arg = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return push({fn, 0.0, arg, -1});
    }
  };
};

inline Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  Parser p{text, 0, e};
  e.root_ = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace latwave
