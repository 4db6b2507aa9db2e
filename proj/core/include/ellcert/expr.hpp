#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ellcert {

/// Closed-form scalar coefficient over the variables x1..xd.
///
/// Grammar (whitespace insensitive, `^` is right associative, unary minus binds
/// looser than `^`):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'pi' | 'x' digits | func '(' expr ')' | '(' expr ')'
///     func    := 'exp' | 'log' | 'sin' | 'cos'
///
/// Expressions are immutable and cheap to copy. Evaluation runs a compiled
/// postfix program and never throws; non-finite results (division by zero,
/// log of a non-positive number) are reported by the caller that samples.
class Expr {
public:
  enum class Op { number, variable, add, sub, mul, div, pow, neg, exp, log, sin, cos };

  /// The constant 0.
  Expr();

  static Expr number(double value);
  /// Variable x_{index+1}.
  static Expr variable(int index);

  /// Throws ParseError with a 1-based column offset by `column_offset`.
  static Expr parse(std::string_view text, int line = 1, int column_offset = 0);

  double operator()(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const { return (*this)(x); }

  /// Canonical text; `parse(e.to_string()) == e` for every expression.
  std::string to_string() const;

  Op op() const;
  /// Number of variables referenced: one past the highest variable index, 0 if none.
  int arity() const;
  std::optional<double> constant_value() const;
  bool is_zero() const;

  /// Exact partial derivative with respect to x_{var+1}, lightly simplified.
  Expr derivative(int var) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, const Expr& exponent);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);

  struct Node;

private:
  explicit Expr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

}  // namespace ellcert
