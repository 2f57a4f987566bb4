#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stal/jet.hpp"

// Scalar expression trees for metric components: parse -> bind -> evaluate
// on jets. Parse and bind failures throw with a byte offset; evaluation
// domain failures return NaN jets plus a located error record instead.

namespace stal {

struct parse_error : std::runtime_error {
  std::size_t offset;
  std::string expected;
  parse_error(const std::string& msg, std::size_t off, std::string exp)
      : std::runtime_error(msg + " at offset " + std::to_string(off)),
        offset(off),
        expected(std::move(exp)) {}
};

struct bind_error : std::runtime_error {
  std::string name;
  std::size_t offset;
  bind_error(const std::string& n, std::size_t off)
      : std::runtime_error("unknown identifier '" + n + "' at offset " +
                           std::to_string(off)),
        name(n),
        offset(off) {}
};

enum class Fn { sin, cos, tan, exp, log, sqrt, sinh, cosh, abs };

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::tan: return "tan";
    case Fn::exp: return "exp";
    case Fn::log: return "log";
    case Fn::sqrt: return "sqrt";
    case Fn::sinh: return "sinh";
    case Fn::cosh: return "cosh";
    case Fn::abs: return "abs";
  }
  return "?";
}

inline bool fn_lookup(std::string_view s, Fn* out) {
  static constexpr Fn all[] = {Fn::sin, Fn::cos,  Fn::tan,  Fn::exp, Fn::log,
                               Fn::sqrt, Fn::sinh, Fn::cosh, Fn::abs};
  for (Fn f : all)
    if (s == fn_name(f)) {
      *out = f;
      return true;
    }
  return false;
}

enum class Op {
  num,
  ident,     // unresolved name, before bind
  coord,     // resolved coordinate, slot 0..3
  param,     // resolved parameter, slot into parameter vector
  add,
  sub,
  mul,
  div,
  neg,
  pow_int,   // integer exponent folded at parse time
  pow_real,  // general exponent kept as a subtree
  call
};

struct ExprNode {
  Op op = Op::num;
  double num = 0.0;
  long long ipow = 0;
  Fn fn = Fn::sin;
  int a = -1, b = -1;
  std::string name;
  int slot = -1;
  std::size_t where = 0;
};

struct Expr {
  std::string source;
  std::vector<ExprNode> nodes;
  int root = -1;
  bool bound = false;
};

namespace detail {

struct Token {
  enum Kind { num, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind = end;
  double value = 0.0;
  std::string text;
  std::size_t off = 0;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.off = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < s.size() &&
         std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const char* begin = s.data() + i;
      char* endp = nullptr;
      t.kind = Token::num;
      t.value = std::strtod(begin, &endp);
      if (endp == begin) throw parse_error("bad number", i, "number");
      i += std::size_t(endp - begin);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                              s[j] == '_'))
        ++j;
      t.kind = Token::ident;
      t.text.assign(s.substr(i, j - i));
      i = j;
      out.push_back(t);
      continue;
    }
    switch (c) {
      case '+': t.kind = Token::plus; break;
      case '-': t.kind = Token::minus; break;
      case '*': t.kind = Token::star; break;
      case '/': t.kind = Token::slash; break;
      case '^': t.kind = Token::caret; break;
      case '(': t.kind = Token::lparen; break;
      case ')': t.kind = Token::rparen; break;
      default:
        throw parse_error(std::string("unexpected character '") + c + "'", i,
                          "operator or operand");
    }
    ++i;
    out.push_back(t);
  }
  Token e;
  e.kind = Token::end;
  e.off = s.size();
  out.push_back(e);
  return out;
}

struct Parser {
  Expr* expr;
  const std::vector<Token>* toks;
  std::size_t pos = 0;
  int depth = 0;

  const Token& peek() const { return (*toks)[pos]; }
  const Token& take() { return (*toks)[pos++]; }

  int make(ExprNode n) {
    expr->nodes.push_back(std::move(n));
    return int(expr->nodes.size()) - 1;
  }

  [[noreturn]] void fail(const std::string& msg, const std::string& exp) {
    throw parse_error(msg, peek().off, exp);
  }

  struct DepthGuard {
    Parser* p;
    explicit DepthGuard(Parser* pp) : p(pp) {
      if (++p->depth > 200) throw parse_error("expression too deeply nested", p->peek().off, "shallower expression");
    }
    ~DepthGuard() { --p->depth; }
  };

  int parse_sum() {
    DepthGuard g(this);
    int lhs = parse_term();
    while (peek().kind == Token::plus || peek().kind == Token::minus) {
      Token op = take();
      int rhs = parse_term();
      ExprNode n;
      n.op = (op.kind == Token::plus) ? Op::add : Op::sub;
      n.a = lhs;
      n.b = rhs;
      n.where = op.off;
      lhs = make(n);
    }
    return lhs;
  }

  int parse_term() {
    DepthGuard g(this);
    int lhs = parse_unary();
    while (peek().kind == Token::star || peek().kind == Token::slash) {
      Token op = take();
      int rhs = parse_unary();
      ExprNode n;
      n.op = (op.kind == Token::star) ? Op::mul : Op::div;
      n.a = lhs;
      n.b = rhs;
      n.where = op.off;
      lhs = make(n);
    }
    return lhs;
  }

  // unary minus binds looser than '^': -x^2 is -(x^2)
  int parse_unary() {
    DepthGuard g(this);
    if (peek().kind == Token::minus) {
      Token op = take();
      int child = parse_unary();
      // fold a negated literal into the literal
      if (expr->nodes[child].op == Op::num) {
        expr->nodes[child].num = -expr->nodes[child].num;
        return child;
      }
      ExprNode n;
      n.op = Op::neg;
      n.a = child;
      n.where = op.off;
      return make(n);
    }
    return parse_power();
  }

  int parse_power() {
    DepthGuard g(this);
    int base = parse_atom();
    if (peek().kind != Token::caret) return base;
    Token op = take();
    int expo = parse_unary();  // right associative, allows x^-2 and x^y^z
    const ExprNode& e = expr->nodes[expo];
    if (e.op == Op::num && std::floor(e.num) == e.num &&
        std::abs(e.num) <= 64.0) {
      ExprNode n;
      n.op = Op::pow_int;
      n.a = base;
      n.ipow = (long long)e.num;
      n.where = op.off;
      return make(n);
    }
    ExprNode n;
    n.op = Op::pow_real;
    n.a = base;
    n.b = expo;
    n.where = op.off;
    return make(n);
  }

  int parse_atom() {
    DepthGuard g(this);
    const Token& t = peek();
    if (t.kind == Token::num) {
      take();
      ExprNode n;
      n.op = Op::num;
      n.num = t.value;
      n.where = t.off;
      return make(n);
    }
    if (t.kind == Token::ident) {
      take();
      if (peek().kind == Token::lparen) {
        Fn f;
        if (!fn_lookup(t.text, &f))
          throw parse_error("unknown function '" + t.text + "'", t.off,
                            "function name");
        take();  // (
        int arg = parse_sum();
        if (peek().kind != Token::rparen) fail("expected ')'", ")");
        take();
        ExprNode n;
        n.op = Op::call;
        n.fn = f;
        n.a = arg;
        n.where = t.off;
        return make(n);
      }
      ExprNode n;
      n.op = Op::ident;
      n.name = t.text;
      n.where = t.off;
      return make(n);
    }
    if (t.kind == Token::lparen) {
      take();
      int inner = parse_sum();
      if (peek().kind != Token::rparen) fail("expected ')'", ")");
      take();
      return inner;
    }
    fail("expected expression", "number, identifier, or '('");
  }
};

}  // namespace detail

inline Expr parse(std::string_view text) {
  Expr e;
  e.source.assign(text);
  auto toks = detail::tokenize(text);
  detail::Parser p{&e, &toks};
  e.root = p.parse_sum();
  if (p.peek().kind != detail::Token::end)
    throw parse_error("trailing input", p.peek().off, "end of expression");
  return e;
}

struct Bindings {
  std::array<std::string, 4> coords;
  std::vector<std::string> params;
};

inline void bind(Expr& e, const Bindings& b) {
  for (ExprNode& n : e.nodes) {
    if (n.op != Op::ident && n.op != Op::coord && n.op != Op::param) continue;
    bool found = false;
    for (int i = 0; i < 4; ++i)
      if (n.name == b.coords[i]) {
        n.op = Op::coord;
        n.slot = i;
        found = true;
        break;
      }
    if (!found)
      for (std::size_t i = 0; i < b.params.size(); ++i)
        if (n.name == b.params[i]) {
          n.op = Op::param;
          n.slot = int(i);
          found = true;
          break;
        }
    if (!found) throw bind_error(n.name, n.where);
  }
  e.bound = true;
}

struct EvalStatus {
  bool ok = true;
  std::size_t error_at = 0;
  std::string error;

  void fail(std::size_t where, const char* what) {
    if (!ok) return;
    ok = false;
    error_at = where;
    error = what;
  }
};

namespace detail {

inline Jet3 eval_node(const Expr& e, int idx, const std::array<Jet3, 4>& coord,
                      const std::vector<double>& param, EvalStatus& st) {
  const ExprNode& n = e.nodes[idx];
  switch (n.op) {
    case Op::num: return Jet3(n.num);
    case Op::coord: return coord[std::size_t(n.slot)];
    case Op::param: return Jet3(param[std::size_t(n.slot)]);
    case Op::ident:
      st.fail(n.where, "expression evaluated before bind");
      return jet_nan();
    case Op::add:
      return eval_node(e, n.a, coord, param, st) +
             eval_node(e, n.b, coord, param, st);
    case Op::sub:
      return eval_node(e, n.a, coord, param, st) -
             eval_node(e, n.b, coord, param, st);
    case Op::mul:
      return eval_node(e, n.a, coord, param, st) *
             eval_node(e, n.b, coord, param, st);
    case Op::div: {
      Jet3 num = eval_node(e, n.a, coord, param, st);
      Jet3 den = eval_node(e, n.b, coord, param, st);
      if (den.v == 0.0) {
        st.fail(n.where, "division by zero");
        return jet_nan();
      }
      return num / den;
    }
    case Op::neg: return -eval_node(e, n.a, coord, param, st);
    case Op::pow_int: {
      Jet3 b = eval_node(e, n.a, coord, param, st);
      if (n.ipow < 0 && b.v == 0.0) {
        st.fail(n.where, "division by zero");
        return jet_nan();
      }
      return jet_pow_int(b, n.ipow);
    }
    case Op::pow_real: {
      Jet3 b = eval_node(e, n.a, coord, param, st);
      Jet3 x = eval_node(e, n.b, coord, param, st);
      if (!(b.v > 0.0)) {
        st.fail(n.where, "power of non-positive base");
        return jet_nan();
      }
      return jet_pow(b, x);
    }
    case Op::call: {
      Jet3 a = eval_node(e, n.a, coord, param, st);
      switch (n.fn) {
        case Fn::sin: return jet_sin(a);
        case Fn::cos: return jet_cos(a);
        case Fn::tan: return jet_tan(a);
        case Fn::exp: return jet_exp(a);
        case Fn::log:
          if (!(a.v > 0.0)) {
            st.fail(n.where, "log of non-positive value");
            return jet_nan();
          }
          return jet_log(a);
        case Fn::sqrt:
          if (!(a.v > 0.0)) {
            st.fail(n.where, "sqrt of non-positive value");
            return jet_nan();
          }
          return jet_sqrt(a);
        case Fn::sinh: return jet_sinh(a);
        case Fn::cosh: return jet_cosh(a);
        case Fn::abs: return jet_abs(a);
      }
      st.fail(n.where, "unknown function");
      return jet_nan();
    }
  }
  st.fail(n.where, "corrupt expression node");
  return jet_nan();
}

inline std::string format_number(double v) {
  // shortest representation that parses back to the same double
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void print_node(const Expr& e, int idx, std::string& out) {
  const ExprNode& n = e.nodes[idx];
  switch (n.op) {
    case Op::num:
      if (n.num < 0.0 || (n.num == 0.0 && std::signbit(n.num))) {
        out += "(-";
        out += format_number(-n.num);
        out += ")";
      } else {
        out += format_number(n.num);
      }
      return;
    case Op::ident:
    case Op::coord:
    case Op::param: out += n.name; return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      out += "(";
      print_node(e, n.a, out);
      switch (n.op) {
        case Op::add: out += " + "; break;
        case Op::sub: out += " - "; break;
        case Op::mul: out += "*"; break;
        default: out += "/"; break;
      }
      print_node(e, n.b, out);
      out += ")";
      return;
    }
    case Op::neg:
      out += "(-";
      print_node(e, n.a, out);
      out += ")";
      return;
    case Op::pow_int:
      out += "(";
      print_node(e, n.a, out);
      out += "^";
      if (n.ipow < 0) {
        out += "(-" + std::to_string(-n.ipow) + ")";
      } else {
        out += std::to_string(n.ipow);
      }
      out += ")";
      return;
    case Op::pow_real:
      out += "(";
      print_node(e, n.a, out);
      out += "^";
      print_node(e, n.b, out);
      out += ")";
      return;
    case Op::call:
      out += fn_name(n.fn);
      out += "(";
      print_node(e, n.a, out);
      out += ")";
      return;
  }
}

inline bool equal_node(const Expr& x, int i, const Expr& y, int j) {
  const ExprNode& a = x.nodes[i];
  const ExprNode& b = y.nodes[j];
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::num: return a.num == b.num;
    case Op::ident:
    case Op::coord:
    case Op::param: return a.name == b.name;
    case Op::neg: return equal_node(x, a.a, y, b.a);
    case Op::pow_int: return a.ipow == b.ipow && equal_node(x, a.a, y, b.a);
    case Op::call: return a.fn == b.fn && equal_node(x, a.a, y, b.a);
    default: return equal_node(x, a.a, y, b.a) && equal_node(x, a.b, y, b.b);
  }
}

}  // namespace detail

// value plus located domain status; callers must consult status.ok
inline Jet3 eval_jet(const Expr& e, const std::array<Jet3, 4>& coord,
                     const std::vector<double>& param, EvalStatus& status) {
  Jet3 r = detail::eval_node(e, e.root, coord, param, status);
  if (!status.ok) return jet_nan();
  return r;
}

inline std::string print(const Expr& e) {
  std::string out;
  detail::print_node(e, e.root, out);
  return out;
}

inline bool equal_structure(const Expr& a, const Expr& b) {
  return detail::equal_node(a, a.root, b, b.root);
}

}  // namespace stal
