#include "chemoloc/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace chemoloc {

namespace {

enum class Fn { sin, cos, exp, sqrt, abs, tanh, min, max };

struct FnInfo {
  const char* name;
  Fn fn;
  int arity;
};

constexpr std::array<FnInfo, 8> kFunctions = {{
    {"sin", Fn::sin, 1},
    {"cos", Fn::cos, 1},
    {"exp", Fn::exp, 1},
    {"sqrt", Fn::sqrt, 1},
    {"abs", Fn::abs, 1},
    {"tanh", Fn::tanh, 1},
    {"min", Fn::min, 2},
    {"max", Fn::max, 2},
}};

}  // namespace

struct Expr::Node {
  enum class Kind { num, pi, var_x, var_y, neg, add, sub, mul, div, pow, call };
  Kind kind;
  double value = 0.0;  // num
  Fn fn = Fn::sin;     // call
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "expected an operator or end of input");
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+'))
        lhs = make(Kind::add, lhs, term());
      else if (consume('-'))
        lhs = make(Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*'))
        lhs = make(Kind::mul, lhs, factor());
      else if (consume('/'))
        lhs = make(Kind::div, lhs, factor());
      else
        return lhs;
    }
  }

  // Unary minus sits between * / and ^, so -x^2 parses as -(x^2) and the
  // exponent may itself be signed (2^-3).
  NodePtr factor() {
    if (consume('-')) return make(Kind::neg, factor());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (consume('^')) return make(Kind::pow, base, factor());
    return base;
  }

  NodePtr primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) throw ParseError(pos_, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(pos_, "expected a number, '(', or identifier");
  }

  NodePtr number() {
    double value = 0.0;
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) throw ParseError(pos_, "malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = make(Kind::num);
    const_cast<Expr::Node*>(n.get())->value = value;
    return n;
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    if (name == "x") return make(Kind::var_x);
    if (name == "y") return make(Kind::var_y);
    if (name == "pi") return make(Kind::pi);
    for (const auto& info : kFunctions) {
      if (name == info.name) return call(info, start);
    }
    throw ParseError(start, "unknown identifier '" + name + "'");
  }

  NodePtr call(const FnInfo& info, std::size_t name_offset) {
    if (!consume('('))
      throw ParseError(pos_, std::string("expected '(' after '") + info.name + "'");
    NodePtr a = expr();
    NodePtr b;
    if (info.arity == 2) {
      if (!consume(','))
        throw ParseError(pos_, std::string("'") + info.name + "' takes two arguments");
      b = expr();
    }
    if (!consume(')')) throw ParseError(pos_, "expected ')'");
    auto n = make(Kind::call, std::move(a), std::move(b));
    const_cast<Expr::Node*>(n.get())->fn = info.fn;
    (void)name_offset;
    return n;
  }
};

double eval_node(const Expr::Node& n, double x, double y) {
  double r = 0.0;
  switch (n.kind) {
    case Kind::num: return n.value;
    case Kind::pi: return std::numbers::pi;
    case Kind::var_x: return x;
    case Kind::var_y: return y;
    case Kind::neg: return -eval_node(*n.a, x, y);
    case Kind::add: r = eval_node(*n.a, x, y) + eval_node(*n.b, x, y); break;
    case Kind::sub: r = eval_node(*n.a, x, y) - eval_node(*n.b, x, y); break;
    case Kind::mul: r = eval_node(*n.a, x, y) * eval_node(*n.b, x, y); break;
    case Kind::div: {
      double a = eval_node(*n.a, x, y);
      double b = eval_node(*n.b, x, y);
      if (b == 0.0) throw EvalError("division by zero");
      r = a / b;
      break;
    }
    case Kind::pow: {
      double a = eval_node(*n.a, x, y);
      double b = eval_node(*n.b, x, y);
      if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
      r = std::pow(a, b);
      break;
    }
    case Kind::call: {
      double a = eval_node(*n.a, x, y);
      switch (n.fn) {
        case Fn::sin: r = std::sin(a); break;
        case Fn::cos: r = std::cos(a); break;
        case Fn::exp: r = std::exp(a); break;
        case Fn::sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative number");
          r = std::sqrt(a);
          break;
        case Fn::abs: r = std::fabs(a); break;
        case Fn::tanh: r = std::tanh(a); break;
        case Fn::min: r = std::fmin(a, eval_node(*n.b, x, y)); break;
        case Fn::max: r = std::fmax(a, eval_node(*n.b, x, y)); break;
      }
      break;
    }
  }
  if (!std::isfinite(r)) throw EvalError("non-finite value in expression");
  return r;
}

void print_node(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::num: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Kind::pi: out += "pi"; return;
    case Kind::var_x: out += "x"; return;
    case Kind::var_y: out += "y"; return;
    case Kind::neg:
      out += "(-";
      print_node(*n.a, out);
      out += ")";
      return;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
    case Kind::pow: {
      char op = n.kind == Kind::add   ? '+'
                : n.kind == Kind::sub ? '-'
                : n.kind == Kind::mul ? '*'
                : n.kind == Kind::div ? '/'
                                      : '^';
      out += "(";
      print_node(*n.a, out);
      out += op;
      print_node(*n.b, out);
      out += ")";
      return;
    }
    case Kind::call: {
      for (const auto& info : kFunctions) {
        if (info.fn == n.fn) {
          out += info.name;
          break;
        }
      }
      out += "(";
      print_node(*n.a, out);
      if (n.b) {
        out += ", ";
        print_node(*n.b, out);
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

Expr Expr::parse(const std::string& source) {
  Parser p(source);
  return Expr(p.run());
}

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y); }

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace chemoloc
