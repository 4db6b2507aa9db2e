#include "ellcert/expr.hpp"

#include "ellcert/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>

namespace ellcert {

namespace {

struct Instr {
  Expr::Op op;
  double value = 0.0;
  int var = 0;
};

struct Program {
  std::vector<Instr> code;
  std::size_t max_depth = 0;
};

}  // namespace

struct Expr::Node {
  Op op = Op::number;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  int arity = 0;

  mutable std::once_flag compiled;
  mutable Program program;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Op;

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto node = std::make_shared<Expr::Node>();
  node->op = op;
  node->arity = std::max(lhs ? lhs->arity : 0, rhs ? rhs->arity : 0);
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

// Literals are kept non-negative so that printing and parsing agree: a negative
// constant is stored as neg(number).
NodePtr make_literal(double value) {
  auto node = std::make_shared<Expr::Node>();
  node->op = Op::number;
  node->value = std::abs(value);
  if (std::signbit(value) && value != 0.0) {
    return make_node(Op::neg, node);
  }
  return node;
}

NodePtr make_variable(int index) {
  auto node = std::make_shared<Expr::Node>();
  node->op = Op::variable;
  node->var = index;
  node->arity = index + 1;
  return node;
}

std::size_t emit(const Expr::Node& node, std::vector<Instr>& code, std::size_t depth) {
  std::size_t max_depth = depth + 1;
  if (node.lhs) max_depth = std::max(max_depth, emit(*node.lhs, code, depth));
  if (node.rhs) max_depth = std::max(max_depth, emit(*node.rhs, code, depth + 1));
  code.push_back({node.op, node.value, node.var});
  return max_depth;
}

const Program& compiled_program(const Expr::Node& node) {
  std::call_once(node.compiled, [&node] {
    node.program.max_depth = emit(node, node.program.code, 0);
  });
  return node.program;
}

double run(const Program& program, std::span<const double> x, double* stack) {
  std::size_t top = 0;
  for (const Instr& in : program.code) {
    switch (in.op) {
      case Op::number: stack[top++] = in.value; break;
      case Op::variable:
        stack[top++] = static_cast<std::size_t>(in.var) < x.size() ? x[in.var] : std::nan("");
        break;
      case Op::add: --top; stack[top - 1] += stack[top]; break;
      case Op::sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::div: --top; stack[top - 1] /= stack[top]; break;
      case Op::pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case Op::neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::log: stack[top - 1] = std::log(stack[top - 1]); break;
      case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
    }
  }
  return stack[0];
}

std::optional<double> literal_of(const NodePtr& node) {
  if (node->op == Op::number) return node->value;
  if (node->op == Op::neg && node->lhs->op == Op::number) return -node->lhs->value;
  return std::nullopt;
}

bool structurally_equal(const Expr::Node* a, const Expr::Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::number:
      // Bitwise identity, so NaN never compares equal to a distinct NaN node.
      return a->value == b->value && std::signbit(a->value) == std::signbit(b->value);
    case Op::variable: return a->var == b->var;
    default:
      return structurally_equal(a->lhs.get(), b->lhs.get()) &&
             structurally_equal(a->rhs.get(), b->rhs.get());
  }
}

int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    default: return "?";
  }
}

void print(const Expr::Node& node, std::string& out);

void print_child(const Expr::Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const Expr::Node& node, std::string& out) {
  const int prec = precedence(node.op);
  switch (node.op) {
    case Op::number: out += format_number(node.value); return;
    case Op::variable: out += "x" + std::to_string(node.var + 1); return;
    case Op::neg:
      out += '-';
      print_child(*node.lhs, precedence(node.lhs->op) < prec || node.lhs->op == Op::neg, out);
      return;
    case Op::pow:
      print_child(*node.lhs, precedence(node.lhs->op) <= prec, out);
      out += '^';
      print_child(*node.rhs, precedence(node.rhs->op) < precedence(Op::neg), out);
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      print_child(*node.lhs, precedence(node.lhs->op) < prec, out);
      const char* sym = node.op == Op::add ? " + " : node.op == Op::sub ? " - " : node.op == Op::mul ? "*" : "/";
      out += sym;
      print_child(*node.rhs, precedence(node.rhs->op) <= prec, out);
      return;
    }
    default:
      out += function_name(node.op);
      out += '(';
      print(*node.lhs, out);
      out += ')';
      return;
  }
}

// Recursive-descent parser over a single line of text.
class Parser {
public:
  Parser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), column_offset_(column_offset) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == text_.size()) fail("empty expression");
    NodePtr result = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    return result;
  }

private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column_offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_node(Op::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(Op::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Op::neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Op::pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    auto node = std::make_shared<Expr::Node>();
    node->op = Op::number;
    node->value = value;
    return node;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "pi") {
      auto node = std::make_shared<Expr::Node>();
      node->op = Op::number;
      node->value = std::numbers::pi;
      return node;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int index = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1 && name[1] != '0') {
        return make_variable(index - 1);
      }
    }
    Op op;
    if (name == "exp") {
      op = Op::exp;
    } else if (name == "log") {
      op = Op::log;
    } else if (name == "sin") {
      op = Op::sin;
    } else if (name == "cos") {
      op = Op::cos;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (!accept('(')) fail("expected '(' after function name");
    NodePtr arg = parse_expr();
    if (!accept(')')) fail("expected ')'");
    return make_node(op, arg);
  }

  std::string_view text_;
  int line_;
  int column_offset_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

Expr::Expr() : root_(make_literal(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expr Expr::number(double value) { return Expr(make_literal(value)); }

Expr Expr::variable(int index) { return Expr(make_variable(index)); }

Expr Expr::parse(std::string_view text, int line, int column_offset) {
  return Expr(Parser(text, line, column_offset).parse());
}

double Expr::operator()(std::span<const double> x) const {
  const Program& program = compiled_program(*root_);
  if (program.max_depth <= 64) {
    std::array<double, 64> stack;
    return run(program, x, stack.data());
  }
  std::vector<double> stack(program.max_depth);
  return run(program, x, stack.data());
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expr::Op Expr::op() const { return root_->op; }

int Expr::arity() const { return root_->arity; }

std::optional<double> Expr::constant_value() const {
  if (const auto literal = literal_of(root_)) return literal;
  if (arity() > 0) return std::nullopt;
  const double value = (*this)(std::span<const double>{});
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

bool Expr::is_zero() const {
  const auto value = constant_value();
  return value && *value == 0.0;
}

bool operator==(const Expr& a, const Expr& b) {
  return structurally_equal(a.root_.get(), b.root_.get());
}

namespace {

bool is_one(const Expr& e) {
  const auto v = e.constant_value();
  return v && *v == 1.0;
}

std::optional<double> fold(double value) {
  if (std::isfinite(value)) return value;
  return std::nullopt;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (auto x = a.constant_value(), y = b.constant_value(); x && y) {
    if (auto v = fold(*x + *y)) return Expr::number(*v);
  }
  return Expr(make_node(Expr::Op::add, a.root_, b.root_));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (auto x = a.constant_value(), y = b.constant_value(); x && y) {
    if (auto v = fold(*x - *y)) return Expr::number(*v);
  }
  return Expr(make_node(Expr::Op::sub, a.root_, b.root_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr::number(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (auto x = a.constant_value(), y = b.constant_value(); x && y) {
    if (auto v = fold(*x * *y)) return Expr::number(*v);
  }
  if (auto x = a.constant_value(); x && *x == -1.0) return -b;
  if (auto y = b.constant_value(); y && *y == -1.0) return -a;
  return Expr(make_node(Expr::Op::mul, a.root_, b.root_));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_one(b)) return a;
  if (auto x = a.constant_value(), y = b.constant_value(); x && y && *y != 0.0) {
    if (auto v = fold(*x / *y)) return Expr::number(*v);
  }
  if (a.is_zero() && b.constant_value().value_or(0.0) != 0.0) return Expr::number(0.0);
  return Expr(make_node(Expr::Op::div, a.root_, b.root_));
}

Expr operator-(const Expr& a) {
  if (auto x = a.constant_value()) return Expr::number(-*x);
  if (a.root_->op == Expr::Op::neg) return Expr(a.root_->lhs);
  return Expr(make_node(Expr::Op::neg, a.root_));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (auto e = exponent.constant_value()) {
    if (*e == 0.0) return Expr::number(1.0);
    if (*e == 1.0) return base;
  }
  if (auto x = base.constant_value(), y = exponent.constant_value(); x && y) {
    if (auto v = fold(std::pow(*x, *y))) return Expr::number(*v);
  }
  return Expr(make_node(Expr::Op::pow, base.root_, exponent.root_));
}

namespace {

template <class Fn>
std::optional<double> fold_unary(const Expr& a, Fn fn) {
  if (auto x = a.constant_value()) return fold(fn(*x));
  return std::nullopt;
}

}  // namespace

Expr exp(const Expr& a) {
  if (auto v = fold_unary(a, [](double x) { return std::exp(x); })) return Expr::number(*v);
  return Expr(make_node(Expr::Op::exp, a.root_));
}

Expr log(const Expr& a) {
  if (auto v = fold_unary(a, [](double x) { return std::log(x); })) return Expr::number(*v);
  return Expr(make_node(Expr::Op::log, a.root_));
}

Expr sin(const Expr& a) {
  if (auto v = fold_unary(a, [](double x) { return std::sin(x); })) return Expr::number(*v);
  return Expr(make_node(Expr::Op::sin, a.root_));
}

Expr cos(const Expr& a) {
  if (auto v = fold_unary(a, [](double x) { return std::cos(x); })) return Expr::number(*v);
  return Expr(make_node(Expr::Op::cos, a.root_));
}

Expr Expr::derivative(int var) const {
  const Node& node = *root_;
  switch (node.op) {
    case Op::number: return Expr::number(0.0);
    case Op::variable: return Expr::number(node.var == var ? 1.0 : 0.0);
    default: break;
  }
  if (root_->arity <= var) return Expr::number(0.0);

  const Expr a(node.lhs);
  const Expr da = a.derivative(var);
  switch (node.op) {
    case Op::neg: return -da;
    case Op::exp: return da * Expr(root_);
    case Op::log: return da / a;
    case Op::sin: return da * cos(a);
    case Op::cos: return -(da * sin(a));
    default: break;
  }

  const Expr b(node.rhs);
  const Expr db = b.derivative(var);
  switch (node.op) {
    case Op::add: return da + db;
    case Op::sub: return da - db;
    case Op::mul: return da * b + a * db;
    case Op::div: return (da * b - a * db) / pow(b, Expr::number(2.0));
    case Op::pow:
      if (db.is_zero()) {
        return b * pow(a, b - Expr::number(1.0)) * da;
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return Expr(root_) * (db * log(a) + b * da / a);
    default: return Expr::number(0.0);
  }
}

}  // namespace ellcert
