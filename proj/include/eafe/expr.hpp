#ifndef EAFE_EXPR_HPP
#define EAFE_EXPR_HPP

#include "eafe/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace eafe {

/// A small arithmetic expression over the coordinates x, y, z.
///
/// Grammar (whitespace insensitive):
///   expr   := term  (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := primary ('^' unary)?          -- right associative
///   primary:= number | 'pi' | x | y | z
///          |  fn '(' expr (',' expr)* ')' | '(' expr ')'
/// with fn one of sin, cos, exp, sqrt, abs (one argument) and min, max
/// (two arguments).
///
/// Parsed expressions are immutable and evaluation is reentrant.
class FieldExpr {
public:
  /// Throws ParseError with the byte offset of the offending character.
  static FieldExpr parse(std::string_view text);

  Real eval(Real x, Real y = 0.0, Real z = 0.0) const;
  Real eval(const Point& p) const;

  /// 0 if no coordinate appears, else 1, 2 or 3 for the highest of x, y, z.
  int max_var() const;
  bool is_constant() const { return max_var() == 0; }

  /// Textual form that parses back to a structurally equal expression.
  std::string str() const;

  bool operator==(const FieldExpr& other) const;

private:
  enum class Op : std::uint8_t {
    Number, Pi, Var,           // leaf
    Neg,                       // unary
    Add, Sub, Mul, Div, Pow,   // binary
    Sin, Cos, Exp, Sqrt, Abs,  // calls, arity 1
    Min, Max                   // calls, arity 2
  };
  struct Node {
    Op op;
    Real value = 0.0;  // Number
    int var = 0;       // Var: 0 = x, 1 = y, 2 = z
    int lhs = -1, rhs = -1;
  };

  friend class ExprParser;
  Real eval_node(int node, Real x, Real y, Real z) const;
  void print_node(int node, int parent_prec, bool right_side, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace eafe

#endif
