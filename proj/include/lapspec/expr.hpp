#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "lapspec/error.hpp"

namespace lapspec {

enum class Func { Sin, Cos, Exp, Sqrt, Abs, Min, Max };

inline std::string_view func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Min: return "min";
    case Func::Max: return "max";
  }
  return "?";
}

/// Immutable expression tree over the variables x, y, z.
class Expr {
public:
  enum class Kind { Number, Pi, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

  struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;   // Number
    int variable = 0;     // Variable: 0=x, 1=y, 2=z
    Func func = Func::Sin; // Call
    std::vector<std::shared_ptr<const Node>> children;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expr() : root_(number_node(0.0)) {}
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double v) { return Expr(number_node(v)); }

  const Node& root() const noexcept { return *root_; }

  double operator()(const std::array<double, 3>& p) const { return eval(*root_, p); }
  double operator()(double x, double y, double z = 0.0) const { return eval(*root_, {x, y, z}); }

  /// Fully parenthesized text that parses back to an identical tree.
  std::string to_string() const {
    std::string out;
    print(*root_, out);
    return out;
  }

  /// Highest-index variable referenced plus one (0 for constant expressions).
  int variable_span() const { return span(*root_); }

  bool is_constant() const { return variable_span() == 0; }

  friend bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

  static NodePtr number_node(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
  }

private:
  static double eval(const Node& n, const std::array<double, 3>& p) {
    switch (n.kind) {
      case Kind::Number: return n.value;
      case Kind::Pi: return std::numbers::pi;
      case Kind::Variable: return p[static_cast<std::size_t>(n.variable)];
      case Kind::Negate: return -eval(*n.children[0], p);
      case Kind::Add: return eval(*n.children[0], p) + eval(*n.children[1], p);
      case Kind::Sub: return eval(*n.children[0], p) - eval(*n.children[1], p);
      case Kind::Mul: return eval(*n.children[0], p) * eval(*n.children[1], p);
      case Kind::Div: return eval(*n.children[0], p) / eval(*n.children[1], p);
      case Kind::Pow: return std::pow(eval(*n.children[0], p), eval(*n.children[1], p));
      case Kind::Call: {
        switch (n.func) {
          case Func::Sin: return std::sin(eval(*n.children[0], p));
          case Func::Cos: return std::cos(eval(*n.children[0], p));
          case Func::Exp: return std::exp(eval(*n.children[0], p));
          case Func::Sqrt: return std::sqrt(eval(*n.children[0], p));
          case Func::Abs: return std::abs(eval(*n.children[0], p));
          case Func::Min:
          case Func::Max: {
            double acc = eval(*n.children[0], p);
            for (std::size_t i = 1; i < n.children.size(); ++i) {
              double v = eval(*n.children[i], p);
              acc = n.func == Func::Min ? std::min(acc, v) : std::max(acc, v);
            }
            return acc;
          }
        }
      }
    }
    return 0.0;
  }

  static void print(const Node& n, std::string& out) {
    switch (n.kind) {
      case Kind::Number: {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, n.value);
        out.append(buf, res.ptr);
        return;
      }
      case Kind::Pi: out += "pi"; return;
      case Kind::Variable: out += "xyz"[n.variable]; return;
      case Kind::Negate:
        out += "(-";
        print(*n.children[0], out);
        out += ')';
        return;
      case Kind::Call:
        out += func_name(n.func);
        out += '(';
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) out += ", ";
          print(*n.children[i], out);
        }
        out += ')';
        return;
      default: break;
    }
    static constexpr std::string_view ops[] = {"+", "-", "*", "/", "^"};
    out += '(';
    print(*n.children[0], out);
    out += ' ';
    out += ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
    out += ' ';
    print(*n.children[1], out);
    out += ')';
  }

  static int span(const Node& n) {
    int s = n.kind == Kind::Variable ? n.variable + 1 : 0;
    for (const auto& c : n.children) s = std::max(s, span(*c));
    return s;
  }

  static bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    if (a.kind == Kind::Number && a.value != b.value) return false;
    if (a.kind == Kind::Variable && a.variable != b.variable) return false;
    if (a.kind == Kind::Call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
      if (!same(*a.children[i], *b.children[i])) return false;
    return true;
  }

  NodePtr root_;
};

namespace detail {

// Recursive-descent parser.
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'pi' | variable | name '(' expr (',' expr)* ')' | '(' expr ')'
class ExprParser {
public:
  ExprParser(std::string_view src, int max_dim) : src_(src), max_dim_(max_dim) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    auto root = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
    return Expr(std::move(root));
  }

private:
  using NodePtr = Expr::NodePtr;
  using Kind = Expr::Kind;

  static std::shared_ptr<Expr::Node> make(Kind kind, std::vector<NodePtr> children) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->children = std::move(children);
    return n;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-')) lhs = make(Kind::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      auto inner = expr();
      expect(')');
      return inner;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return Expr::number_node(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::array<Func, 7> kFuncs{Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs, Func::Min, Func::Max};
    for (Func f : kFuncs) {
      if (name != func_name(f)) continue;
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      const bool variadic = f == Func::Min || f == Func::Max;
      if ((variadic && args.size() < 2) || (!variadic && args.size() != 1))
        throw ParseError("wrong number of arguments to " + std::string(name) + " (got " + std::to_string(args.size()) + ")", start);
      auto n = make(Kind::Call, std::move(args));
      n->func = f;
      return n;
    }
    if (name == "pi") return make(Kind::Pi, {});
    if (name.size() == 1 && name[0] >= 'x' && name[0] <= 'z' && name[0] - 'x' < max_dim_) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::Variable;
      n->variable = name[0] - 'x';
      return n;
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  int max_dim_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses an arithmetic expression. Variables are x, y and (when max_dim is 3)
/// z; functions are sin, cos, exp, sqrt, abs, min, max; `pi` is predefined.
/// Throws ParseError with the byte offset of the offending token.
inline Expr parse_expression(std::string_view source, int max_dim = 3) {
  return detail::ExprParser(source, max_dim).parse();
}

} // namespace lapspec
