#include "eafe/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace eafe {

class ExprParser {
public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  FieldExpr run() {
    FieldExpr e;
    nodes_ = &e.nodes_;
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  using Op = FieldExpr::Op;

  struct FnInfo {
    Op op;
    int arity;
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add(FieldExpr::Node node) {
    nodes_->push_back(node);
    return static_cast<int>(nodes_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (true) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      const int rhs = parse_term();
      lhs = add({c == '+' ? Op::Add : Op::Sub, 0.0, 0, lhs, rhs});
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (true) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      const int rhs = parse_unary();
      lhs = add({c == '*' ? Op::Mul : Op::Div, 0.0, 0, lhs, rhs});
    }
  }

  int parse_unary() {
    if (consume('-')) {
      const int child = parse_unary();
      return add({Op::Neg, 0.0, 0, child, -1});
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (consume('^')) {
      // Right associative; the exponent may carry a unary minus.
      const int exponent = parse_unary();
      return add({Op::Pow, 0.0, 0, base, exponent});
    }
    return base;
  }

  int parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    Real value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr == begin) fail("invalid number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return add({Op::Number, value, 0, -1, -1});
  }

  int parse_identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    if (name == "x") return add({Op::Var, 0.0, 0, -1, -1});
    if (name == "y") return add({Op::Var, 0.0, 1, -1, -1});
    if (name == "z") return add({Op::Var, 0.0, 2, -1, -1});
    if (name == "pi") return add({Op::Pi, 0.0, 0, -1, -1});

    static const std::map<std::string, FnInfo> fns = {
        {"sin", {Op::Sin, 1}}, {"cos", {Op::Cos, 1}}, {"exp", {Op::Exp, 1}},
        {"sqrt", {Op::Sqrt, 1}}, {"abs", {Op::Abs, 1}},
        {"min", {Op::Min, 2}}, {"max", {Op::Max, 2}}};
    auto it = fns.find(name);
    if (it == fns.end()) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }

    if (!consume('(')) fail("expected '(' after '" + name + "'");
    std::vector<int> args;
    args.push_back(parse_expr());
    while (consume(',')) args.push_back(parse_expr());
    if (!consume(')')) fail("expected ')'");
    if (static_cast<int>(args.size()) != it->second.arity)
      fail("arity mismatch: '" + name + "' takes " + std::to_string(it->second.arity) +
           " argument(s), got " + std::to_string(args.size()));
    return add({it->second.op, 0.0, 0, args[0], args.size() > 1 ? args[1] : -1});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<FieldExpr::Node>* nodes_ = nullptr;
};

FieldExpr FieldExpr::parse(std::string_view text) { return ExprParser(text).run(); }

Real FieldExpr::eval_node(int node, Real x, Real y, Real z) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Pi: return std::numbers::pi;
    case Op::Var: return n.var == 0 ? x : (n.var == 1 ? y : z);
    case Op::Neg: return -eval_node(n.lhs, x, y, z);
    case Op::Add: return eval_node(n.lhs, x, y, z) + eval_node(n.rhs, x, y, z);
    case Op::Sub: return eval_node(n.lhs, x, y, z) - eval_node(n.rhs, x, y, z);
    case Op::Mul: return eval_node(n.lhs, x, y, z) * eval_node(n.rhs, x, y, z);
    case Op::Div: return eval_node(n.lhs, x, y, z) / eval_node(n.rhs, x, y, z);
    case Op::Pow: return std::pow(eval_node(n.lhs, x, y, z), eval_node(n.rhs, x, y, z));
    case Op::Sin: return std::sin(eval_node(n.lhs, x, y, z));
    case Op::Cos: return std::cos(eval_node(n.lhs, x, y, z));
    case Op::Exp: return std::exp(eval_node(n.lhs, x, y, z));
    case Op::Sqrt: return std::sqrt(eval_node(n.lhs, x, y, z));
    case Op::Abs: return std::abs(eval_node(n.lhs, x, y, z));
    case Op::Min: return std::min(eval_node(n.lhs, x, y, z), eval_node(n.rhs, x, y, z));
    case Op::Max: return std::max(eval_node(n.lhs, x, y, z), eval_node(n.rhs, x, y, z));
  }
  return 0.0;
}

Real FieldExpr::eval(Real x, Real y, Real z) const { return eval_node(root_, x, y, z); }

Real FieldExpr::eval(const Point& p) const {
  return eval(p(0), p.size() > 1 ? p(1) : 0.0, p.size() > 2 ? p(2) : 0.0);
}

int FieldExpr::max_var() const {
  int mv = 0;
  for (const auto& n : nodes_)
    if (n.op == Op::Var) mv = std::max(mv, n.var + 1);
  return mv;
}

// Precedence levels for printing: 1 additive, 2 multiplicative, 3 unary
// minus, 4 power (higher binds tighter).
namespace {
constexpr int precedence(int level) { return level; }
}  // namespace

void FieldExpr::print_node(int node, int parent_prec, bool right_side, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  auto binary = [&](const char* sym, int prec, bool assoc_left) {
    const bool parens = prec < parent_prec || (prec == parent_prec && right_side && assoc_left);
    if (parens) out += '(';
    print_node(n.lhs, prec, false, out);
    out += sym;
    print_node(n.rhs, prec, true, out);
    if (parens) out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n.lhs, 0, false, out);
    if (n.rhs >= 0) {
      out += ", ";
      print_node(n.rhs, 0, false, out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), n.value);
      out.append(buf, res.ptr);
      break;
    }
    case Op::Pi: out += "pi"; break;
    case Op::Var: out += (n.var == 0 ? 'x' : (n.var == 1 ? 'y' : 'z')); break;
    case Op::Neg: {
      const int prec = precedence(3);
      const bool parens = prec < parent_prec;
      if (parens) out += '(';
      out += '-';
      print_node(n.lhs, prec, true, out);
      if (parens) out += ')';
      break;
    }
    case Op::Add: binary("+", precedence(1), true); break;
    case Op::Sub: binary("-", precedence(1), true); break;
    case Op::Mul: binary("*", precedence(2), true); break;
    case Op::Div: binary("/", precedence(2), true); break;
    case Op::Pow: {
      // Right associative and tighter than unary minus.
      const int prec = precedence(4);
      const bool parens = prec <= parent_prec;
      if (parens) out += '(';
      print_node(n.lhs, prec, false, out);
      out += '^';
      print_node(n.rhs, prec - 1, true, out);
      if (parens) out += ')';
      break;
    }
    case Op::Sin: call("sin"); break;
    case Op::Cos: call("cos"); break;
    case Op::Exp: call("exp"); break;
    case Op::Sqrt: call("sqrt"); break;
    case Op::Abs: call("abs"); break;
    case Op::Min: call("min"); break;
    case Op::Max: call("max"); break;
  }
}

std::string FieldExpr::str() const {
  std::string out;
  print_node(root_, 0, false, out);
  return out;
}

bool FieldExpr::operator==(const FieldExpr& other) const {
  // Structural comparison by simultaneous traversal.
  std::function<bool(int, int)> eq = [&](int ia, int ib) -> bool {
    if ((ia < 0) != (ib < 0)) return false;
    if (ia < 0) return true;
    const Node& na = nodes_[static_cast<std::size_t>(ia)];
    const Node& nb = other.nodes_[static_cast<std::size_t>(ib)];
    if (na.op != nb.op) return false;
    if (na.op == Op::Number && na.value != nb.value) return false;
    if (na.op == Op::Var && na.var != nb.var) return false;
    return eq(na.lhs, nb.lhs) && eq(na.rhs, nb.rhs);
  };
  return eq(root_, other.root_);
}

}  // namespace eafe
