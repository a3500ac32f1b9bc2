#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "algebroid/errors.hpp"

namespace algebroid {

/// Minimal arithmetic expression language for model files. Grammar (see
/// docs/model_format.md for the normative version):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'
///
/// NAME is a declared variable, the constant `pi`, or one of sin, cos, exp,
/// log, sqrt. Numbers are decimal with optional fraction and exponent.
class Expression {
 public:
  static Expression parse(const std::string& src,
                          const std::vector<std::string>& variables) {
    Parser p{src, variables, 0};
    Expression e;
    e.source_ = src;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size())
      throw ParseError("expression '" + src + "': trailing input at position " +
                       std::to_string(p.pos));
    return e;
  }

  double eval(const Eigen::VectorXd& vars) const { return root_->eval(vars); }

  const std::string& source() const { return source_; }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(const Eigen::VectorXd& vars) const = 0;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Num : Node {
    double v;
    explicit Num(double x) : v(x) {}
    double eval(const Eigen::VectorXd&) const override { return v; }
  };
  struct Var : Node {
    int idx;
    explicit Var(int i) : idx(i) {}
    double eval(const Eigen::VectorXd& vars) const override {
      return vars[idx];
    }
  };
  struct Unary : Node {
    char op;
    NodePtr a;
    Unary(char o, NodePtr x) : op(o), a(std::move(x)) {}
    double eval(const Eigen::VectorXd& v) const override {
      return op == '-' ? -a->eval(v) : a->eval(v);
    }
  };
  struct Binary : Node {
    char op;
    NodePtr a, b;
    Binary(char o, NodePtr x, NodePtr y)
        : op(o), a(std::move(x)), b(std::move(y)) {}
    double eval(const Eigen::VectorXd& v) const override {
      const double x = a->eval(v), y = b->eval(v);
      switch (op) {
        case '+': return x + y;
        case '-': return x - y;
        case '*': return x * y;
        case '/': return x / y;
        default: return std::pow(x, y);
      }
    }
  };
  struct Call : Node {
    double (*fn)(double);
    NodePtr a;
    Call(double (*f)(double), NodePtr x) : fn(f), a(std::move(x)) {}
    double eval(const Eigen::VectorXd& v) const override {
      return fn(a->eval(v));
    }
  };

  struct Parser {
    const std::string& src;
    const std::vector<std::string>& vars;
    std::size_t pos;

    void skip_ws() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
        ++pos;
    }

    bool match(char c) {
      skip_ws();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    [[noreturn]] void fail(const std::string& what) {
      throw ParseError("expression '" + src + "': " + what + " at position " +
                       std::to_string(pos));
    }

    NodePtr parse_expr() {
      NodePtr a = parse_term();
      for (;;) {
        skip_ws();
        if (match('+')) a = std::make_shared<Binary>('+', a, parse_term());
        else if (match('-')) a = std::make_shared<Binary>('-', a, parse_term());
        else return a;
      }
    }

    NodePtr parse_term() {
      NodePtr a = parse_unary();
      for (;;) {
        skip_ws();
        if (match('*')) a = std::make_shared<Binary>('*', a, parse_unary());
        else if (match('/')) a = std::make_shared<Binary>('/', a, parse_unary());
        else return a;
      }
    }

    NodePtr parse_unary() {
      skip_ws();
      if (match('-')) return std::make_shared<Unary>('-', parse_unary());
      if (match('+')) return parse_unary();
      return parse_power();
    }

    NodePtr parse_power() {
      NodePtr a = parse_primary();
      if (match('^')) return std::make_shared<Binary>('^', a, parse_unary());
      return a;
    }

    NodePtr parse_primary() {
      skip_ws();
      if (pos >= src.size()) fail("unexpected end of input");
      const char c = src[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        return parse_name();
      if (match('(')) {
        NodePtr a = parse_expr();
        if (!match(')')) fail("expected ')'");
        return a;
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
      const std::size_t start = pos;
      while (pos < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
        ++pos;
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        std::size_t e = pos + 1;
        if (e < src.size() && (src[e] == '+' || src[e] == '-')) ++e;
        if (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) {
          pos = e;
          while (pos < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[pos])))
            ++pos;
        }
      }
      try {
        return std::make_shared<Num>(std::stod(src.substr(start, pos - start)));
      } catch (const std::exception&) {
        pos = start;
        fail("malformed number");
      }
    }

    NodePtr parse_name() {
      const std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      const std::string name = src.substr(start, pos - start);
      skip_ws();
      if (pos < src.size() && src[pos] == '(') {
        ++pos;
        double (*fn)(double) = nullptr;
        if (name == "sin") fn = std::sin;
        else if (name == "cos") fn = std::cos;
        else if (name == "exp") fn = std::exp;
        else if (name == "log") fn = std::log;
        else if (name == "sqrt") fn = std::sqrt;
        else fail("unknown function '" + name + "'");
        NodePtr a = parse_expr();
        if (!match(')')) fail("expected ')' after function argument");
        return std::make_shared<Call>(fn, a);
      }
      if (name == "pi") return std::make_shared<Num>(std::acos(-1.0));
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return std::make_shared<Var>(static_cast<int>(i));
      fail("unknown variable '" + name + "'");
    }
  };

  std::string source_;
  NodePtr root_;
};

}  // namespace algebroid
