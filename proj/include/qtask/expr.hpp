#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qtask {

// A small closed expression language over named numeric values: arithmetic,
// comparisons, boolean connectives and selection. Point rules, data rules,
// success predicates and handler computations are all written in it, which
// keeps their dependency sets auditable (free_vars below).
//
//   expr    := cmp (('==' | '!=' | '<' | '<=' | '>' | '>=') cmp)?
//   cmp     := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | atom
//   atom    := number | 'pi' | name | name '(' args ')' | '(' expr ')'
//
// Builtins: select(c,a,b), and, or, not, xor, eq, ne, min, max, abs, floor,
// mod(a,m), grid(v,lo,hi,n). Booleans are 0/1.

class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& msg, std::size_t pos) : std::runtime_error(msg), position(pos) {}
  std::size_t position;
};

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace expr_detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Var, Unary, Binary, Call };
  Kind kind;
  double number = 0.0;
  std::string name;  // var name, operator spelling, or function name
  std::vector<NodePtr> args;
};

inline NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}
inline NodePtr make_var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Var;
  n->name = std::move(name);
  return n;
}
inline NodePtr make_unary(std::string op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Unary;
  n->name = std::move(op);
  n->args = {std::move(a)};
  return n;
}
inline NodePtr make_binary(std::string op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->name = std::move(op);
  n->args = {std::move(a), std::move(b)};
  return n;
}
inline NodePtr make_call(std::string fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->name = std::move(fn);
  n->args = std::move(args);
  return n;
}

inline int builtin_arity(const std::string& fn) {
  if (fn == "not" || fn == "abs" || fn == "floor") return 1;
  if (fn == "and" || fn == "or" || fn == "xor" || fn == "eq" || fn == "ne" || fn == "min" || fn == "max" ||
      fn == "mod")
    return 2;
  if (fn == "select") return 3;
  if (fn == "grid") return 4;
  return -1;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto e = parse_compare();
    skip_ws();
    if (pos_ != text_.size()) throw ExprError("unexpected trailing input in expression", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_compare() {
    auto lhs = parse_sum();
    skip_ws();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (eat(op)) {
        auto rhs = parse_sum();
        return make_binary(op, lhs, rhs);
      }
    }
    return lhs;
  }
  NodePtr parse_sum() {
    auto lhs = parse_term();
    while (true) {
      skip_ws();
      if (eat("+"))
        lhs = make_binary("+", lhs, parse_term());
      else if (eat("-"))
        lhs = make_binary("-", lhs, parse_term());
      else
        break;
    }
    return lhs;
  }
  NodePtr parse_term() {
    auto lhs = parse_unary();
    while (true) {
      skip_ws();
      if (eat("*"))
        lhs = make_binary("*", lhs, parse_unary());
      else if (eat("/"))
        lhs = make_binary("/", lhs, parse_unary());
      else
        break;
    }
    return lhs;
  }
  NodePtr parse_unary() {
    skip_ws();
    if (eat("-")) return make_unary("-", parse_unary());
    return parse_atom();
  }
  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExprError("expression ended unexpectedly", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_compare();
      if (!eat(")")) throw ExprError("missing ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' || text_[end] == 'e' ||
              text_[end] == 'E' || ((text_[end] == '+' || text_[end] == '-') && (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
        ++end;
      double v = 0;
      try {
        v = std::stod(std::string(text_.substr(pos_, end - pos_)));
      } catch (const std::exception&) {
        throw ExprError("bad numeric literal", pos_);
      }
      pos_ = end;
      return make_number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_' ||
                                    text_[end] == '.'))
        ++end;
      std::string name(text_.substr(pos_, end - pos_));
      pos_ = end;
      if (name == "pi") return make_number(3.14159265358979323846);
      skip_ws();
      if (peek() == '(') {
        ++pos_;  // consume '('
        int arity = builtin_arity(name);
        if (arity < 0) throw ExprError("unknown function '" + name + "'", pos_);
        std::vector<NodePtr> args;
        if (peek() != ')') {
          args.push_back(parse_compare());
          while (eat(",")) args.push_back(parse_compare());
        }
        if (!eat(")")) throw ExprError("missing ')' in call to '" + name + "'", pos_);
        if (static_cast<int>(args.size()) != arity)
          throw ExprError("'" + name + "' expects " + std::to_string(arity) + " arguments", pos_);
        return make_call(name, std::move(args));
      }
      return make_var(name);
    }
    throw ExprError(std::string("unexpected character '") + c + "' in expression", pos_);
  }
};

inline bool truthy(double v) { return v != 0.0; }

}  // namespace expr_detail

// Read-only name scope used during evaluation.
using Scope = std::map<std::string, double>;

class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view text) {
    Expr e;
    e.text_ = std::string(text);
    e.root_ = expr_detail::Parser(text).parse();
    return e;
  }

  static Expr constant(double v) {
    Expr e;
    e.text_ = std::to_string(v);
    e.root_ = expr_detail::make_number(v);
    return e;
  }

  bool valid() const { return root_ != nullptr; }
  const std::string& text() const { return text_; }

  double eval(const Scope& scope) const {
    if (!root_) throw EvalError("evaluating an empty expression");
    return eval_node(*root_, scope);
  }

  std::set<std::string> free_vars() const {
    std::set<std::string> out;
    if (root_) collect(*root_, out);
    return out;
  }

 private:
  std::string text_;
  expr_detail::NodePtr root_;

  static void collect(const expr_detail::Node& n, std::set<std::string>& out) {
    if (n.kind == expr_detail::Node::Kind::Var) out.insert(n.name);
    for (const auto& a : n.args) collect(*a, out);
  }

  static double eval_node(const expr_detail::Node& n, const Scope& scope) {
    using K = expr_detail::Node::Kind;
    using expr_detail::truthy;
    switch (n.kind) {
      case K::Number: return n.number;
      case K::Var: {
        auto it = scope.find(n.name);
        if (it == scope.end()) throw EvalError("unknown name '" + n.name + "'");
        return it->second;
      }
      case K::Unary: return -eval_node(*n.args[0], scope);
      case K::Binary: {
        double a = eval_node(*n.args[0], scope);
        double b = eval_node(*n.args[1], scope);
        const std::string& op = n.name;
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "/") {
          if (b == 0.0) throw EvalError("division by zero");
          return a / b;
        }
        if (op == "==") return a == b ? 1.0 : 0.0;
        if (op == "!=") return a != b ? 1.0 : 0.0;
        if (op == "<") return a < b ? 1.0 : 0.0;
        if (op == "<=") return a <= b ? 1.0 : 0.0;
        if (op == ">") return a > b ? 1.0 : 0.0;
        if (op == ">=") return a >= b ? 1.0 : 0.0;
        throw EvalError("unknown operator '" + op + "'");
      }
      case K::Call: {
        const std::string& fn = n.name;
        auto arg = [&](std::size_t i) { return eval_node(*n.args[i], scope); };
        if (fn == "select") return truthy(arg(0)) ? arg(1) : arg(2);
        if (fn == "and") return (truthy(arg(0)) && truthy(arg(1))) ? 1.0 : 0.0;
        if (fn == "or") return (truthy(arg(0)) || truthy(arg(1))) ? 1.0 : 0.0;
        if (fn == "not") return truthy(arg(0)) ? 0.0 : 1.0;
        if (fn == "xor") return (truthy(arg(0)) != truthy(arg(1))) ? 1.0 : 0.0;
        if (fn == "eq") return arg(0) == arg(1) ? 1.0 : 0.0;
        if (fn == "ne") return arg(0) != arg(1) ? 1.0 : 0.0;
        if (fn == "min") return std::min(arg(0), arg(1));
        if (fn == "max") return std::max(arg(0), arg(1));
        if (fn == "abs") return std::abs(arg(0));
        if (fn == "floor") return std::floor(arg(0));
        if (fn == "mod") {
          double m = arg(1);
          if (m <= 0) throw EvalError("mod modulus must be positive");
          double r = std::fmod(arg(0), m);
          return r < 0 ? r + m : r;
        }
        if (fn == "grid") {
          // grid(v, lo, hi, n): v-th of n evenly spaced points on [lo, hi]
          double v = arg(0), lo = arg(1), hi = arg(2), count = arg(3);
          if (count < 2) throw EvalError("grid needs at least 2 points");
          return lo + (hi - lo) * v / (count - 1);
        }
        throw EvalError("unknown function '" + fn + "'");
      }
    }
    throw EvalError("corrupt expression node");
  }
};

}  // namespace qtask
