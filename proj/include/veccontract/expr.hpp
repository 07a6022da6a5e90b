#pragma once

// Arithmetic expression trees: parsing, evaluation, exact symbolic
// differentiation. Vector fields f(t,x) and comparison maps phi(t,u[,x])
// are written as plain text over a declared variable list and turned into
// immutable ASTs here.
//
// Grammar (left-associative +,-,*,/; '^' binds tighter than unary minus,
// exponents must fold to constants):
//
//   expression := term (('+'|'-') term)*
//   term       := unary (('*'|'/') unary)*
//   unary      := '-' unary | power
//   power      := primary ('^' unary)?
//   primary    := number | identifier | identifier '(' expression ')'
//               | '(' expression ')'
//
// Functions: sin, cos, exp, tanh, sqrt, abs, sign. sign is what abs
// differentiates to (sign(0) = 0), so derivatives stay inside the grammar.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veccontract/errors.hpp"

namespace veccontract::expr {

enum class NodeKind { constant, variable, negate, binary, call };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Func { sin, cos, exp, tanh, sqrt, abs, sign };

struct Node;
using Ast = std::shared_ptr<const Node>;

/// Immutable expression node. negate/call use lhs as their only child.
struct Node {
  NodeKind kind;
  double value = 0.0;           // constant payload
  std::string name;             // variable payload
  int var_index = -1;           // slot in the declared variable list
  BinaryOp op = BinaryOp::add;  // binary payload
  Func fn = Func::sin;          // call payload
  Ast lhs;
  Ast rhs;
};

inline Ast make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = v;
  return n;
}

inline Ast make_variable(std::string name, int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->name = std::move(name);
  n->var_index = index;
  return n;
}

inline Ast make_negate(Ast a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::negate;
  n->lhs = std::move(a);
  return n;
}

inline Ast make_binary(BinaryOp op, Ast a, Ast b) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline Ast make_call(Func fn, Ast a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::call;
  n->fn = fn;
  n->lhs = std::move(a);
  return n;
}

inline bool is_constant(const Ast& a, double v) {
  return a->kind == NodeKind::constant && a->value == v;
}

/// Structural equality (constants compared with ==).
inline bool equal(const Ast& a, const Ast& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::constant:
      return a->value == b->value;
    case NodeKind::variable:
      return a->name == b->name;
    case NodeKind::negate:
      return equal(a->lhs, b->lhs);
    case NodeKind::binary:
      return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case NodeKind::call:
      return a->fn == b->fn && equal(a->lhs, b->lhs);
  }
  return false;
}

namespace detail {

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::tanh: return "tanh";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::sign: return "sign";
  }
  return "?";
}

inline bool lookup_func(std::string_view name, Func& out) {
  static const std::pair<std::string_view, Func> table[] = {
      {"sin", Func::sin},   {"cos", Func::cos},   {"exp", Func::exp},
      {"tanh", Func::tanh}, {"sqrt", Func::sqrt}, {"abs", Func::abs},
      {"sign", Func::sign}};
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

inline double apply_func(Func fn, double x) {
  switch (fn) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::exp: return std::exp(x);
    case Func::tanh: return std::tanh(x);
    case Func::sqrt:
      if (x < 0.0)
        throw Error(ErrorCode::domain_error,
                    "sqrt of negative value " + std::to_string(x));
      return std::sqrt(x);
    case Func::abs: return std::abs(x);
    case Func::sign: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

inline double apply_pow(double base, double exponent) {
  if (base < 0.0 && exponent != std::floor(exponent))
    throw Error(ErrorCode::domain_error,
                "negative base with non-integer exponent");
  if (base == 0.0 && exponent < 0.0)
    throw Error(ErrorCode::domain_error, "zero base with negative exponent");
  return std::pow(base, exponent);
}

inline double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div:
      if (b == 0.0) throw Error(ErrorCode::domain_error, "division by zero");
      return a / b;
    case BinaryOp::pow: return apply_pow(a, b);
  }
  return 0.0;
}

}  // namespace detail

/// Evaluate with variable slots bound positionally (the declared order used
/// at parse time). This is the integrator's hot path.
inline double eval(const Ast& ast, std::span<const double> values) {
  switch (ast->kind) {
    case NodeKind::constant:
      return ast->value;
    case NodeKind::variable:
      if (ast->var_index < 0 ||
          ast->var_index >= static_cast<int>(values.size()))
        throw Error(ErrorCode::unbound_variable,
                    "variable '" + ast->name + "' has no bound slot");
      return values[static_cast<std::size_t>(ast->var_index)];
    case NodeKind::negate:
      return -eval(ast->lhs, values);
    case NodeKind::binary:
      return detail::apply_binary(ast->op, eval(ast->lhs, values),
                                  eval(ast->rhs, values));
    case NodeKind::call:
      return detail::apply_func(ast->fn, eval(ast->lhs, values));
  }
  return 0.0;
}

/// Evaluate with named bindings; every variable in the tree must be bound.
inline double eval(const Ast& ast, const std::map<std::string, double>& bindings) {
  switch (ast->kind) {
    case NodeKind::constant:
      return ast->value;
    case NodeKind::variable: {
      auto it = bindings.find(ast->name);
      if (it == bindings.end())
        throw Error(ErrorCode::unbound_variable,
                    "unbound variable '" + ast->name + "'");
      return it->second;
    }
    case NodeKind::negate:
      return -eval(ast->lhs, bindings);
    case NodeKind::binary:
      return detail::apply_binary(ast->op, eval(ast->lhs, bindings),
                                  eval(ast->rhs, bindings));
    case NodeKind::call:
      return detail::apply_func(ast->fn, eval(ast->lhs, bindings));
  }
  return 0.0;
}

namespace detail {

// ---- parser -------------------------------------------------------------

struct Token {
  enum Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind = end;
  std::size_t offset = 0;
  std::string text;
  double value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& current() const { return tok_; }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::end;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Token::plus; ++pos_; return;
      case '-': tok_.kind = Token::minus; ++pos_; return;
      case '*': tok_.kind = Token::star; ++pos_; return;
      case '/': tok_.kind = Token::slash; ++pos_; return;
      case '^': tok_.kind = Token::caret; ++pos_; return;
      case '(': tok_.kind = Token::lparen; ++pos_; return;
      case ')': tok_.kind = Token::rparen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(ErrorCode::syntax_error, pos_,
                     std::string("unexpected character '") + c + "'");
  }

 private:
  // Digits, optional fraction, optional exponent; deliberately narrower than
  // strtod (no hex, no inf/nan literals).
  void lex_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to something else, stop before it
      }
    }
    const std::string slice(src_.substr(start, pos_ - start));
    char* endp = nullptr;
    const double v = std::strtod(slice.c_str(), &endp);
    if (endp != slice.c_str() + slice.size())
      throw ParseError(ErrorCode::syntax_error, start, "malformed number '" + slice + "'");
    if (!std::isfinite(v))
      throw ParseError(ErrorCode::syntax_error, start, "number out of range '" + slice + "'");
    tok_.kind = Token::number;
    tok_.value = v;
    tok_.text = slice;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

// Fold a subtree to a constant if it contains no variables. Returns nullptr
// when folding is impossible (variables present or a domain error).
inline Ast try_fold_constant(const Ast& a) {
  switch (a->kind) {
    case NodeKind::constant:
      return a;
    case NodeKind::variable:
      return nullptr;
    case NodeKind::negate: {
      Ast c = try_fold_constant(a->lhs);
      return c ? make_constant(-c->value) : nullptr;
    }
    case NodeKind::binary: {
      Ast l = try_fold_constant(a->lhs);
      Ast r = l ? try_fold_constant(a->rhs) : nullptr;
      if (!l || !r) return nullptr;
      try {
        double v = apply_binary(a->op, l->value, r->value);
        return std::isfinite(v) ? make_constant(v) : nullptr;
      } catch (const Error&) {
        return nullptr;
      }
    }
    case NodeKind::call: {
      Ast c = try_fold_constant(a->lhs);
      if (!c) return nullptr;
      try {
        double v = apply_func(a->fn, c->value);
        return std::isfinite(v) ? make_constant(v) : nullptr;
      } catch (const Error&) {
        return nullptr;
      }
    }
  }
  return nullptr;
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> variables)
      : lexer_(src) {
    for (std::size_t i = 0; i < variables.size(); ++i)
      var_slots_.emplace(variables[i], static_cast<int>(i));
  }

  Ast parse_all() {
    Ast e = parse_expression();
    const Token& t = lexer_.current();
    if (t.kind != Token::end)
      throw ParseError(ErrorCode::syntax_error, t.offset, "unexpected trailing input");
    return e;
  }

 private:
  Ast parse_expression() {
    Ast lhs = parse_term();
    for (;;) {
      const Token::Kind k = lexer_.current().kind;
      if (k != Token::plus && k != Token::minus) return lhs;
      lexer_.advance();
      Ast rhs = parse_term();
      lhs = make_binary(k == Token::plus ? BinaryOp::add : BinaryOp::sub,
                        std::move(lhs), std::move(rhs));
    }
  }

  Ast parse_term() {
    Ast lhs = parse_unary();
    for (;;) {
      const Token::Kind k = lexer_.current().kind;
      if (k != Token::star && k != Token::slash) return lhs;
      lexer_.advance();
      Ast rhs = parse_unary();
      lhs = make_binary(k == Token::star ? BinaryOp::mul : BinaryOp::div,
                        std::move(lhs), std::move(rhs));
    }
  }

  Ast parse_unary() {
    if (lexer_.current().kind == Token::minus) {
      lexer_.advance();
      Ast child = parse_unary();
      if (child->kind == NodeKind::constant)
        return make_constant(-child->value);  // negative literals stay constants
      return make_negate(std::move(child));
    }
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_primary();
    if (lexer_.current().kind != Token::caret) return base;
    const std::size_t caret_offset = lexer_.current().offset;
    lexer_.advance();
    Ast exponent = parse_unary();  // right-associative: x^2^3 = x^(2^3)
    Ast folded = try_fold_constant(exponent);
    if (!folded)
      throw ParseError(ErrorCode::non_constant_exponent, caret_offset,
                       "exponent does not reduce to a constant");
    return make_binary(BinaryOp::pow, std::move(base), std::move(folded));
  }

  Ast parse_primary() {
    const Token t = lexer_.current();
    switch (t.kind) {
      case Token::number:
        lexer_.advance();
        return make_constant(t.value);
      case Token::ident: {
        lexer_.advance();
        if (lexer_.current().kind == Token::lparen) {
          Func fn;
          if (!lookup_func(t.text, fn))
            throw ParseError(ErrorCode::unknown_identifier, t.offset,
                             "unknown function '" + t.text + "'");
          lexer_.advance();
          Ast arg = parse_expression();
          expect(Token::rparen, "expected ')'");
          return make_call(fn, std::move(arg));
        }
        auto it = var_slots_.find(t.text);
        if (it == var_slots_.end())
          throw ParseError(ErrorCode::unknown_identifier, t.offset,
                           "unknown identifier '" + t.text + "'");
        return make_variable(t.text, it->second);
      }
      case Token::lparen: {
        lexer_.advance();
        Ast inner = parse_expression();
        expect(Token::rparen, "expected ')'");
        return inner;
      }
      default:
        throw ParseError(ErrorCode::syntax_error, t.offset, "expected expression");
    }
  }

  void expect(Token::Kind kind, const char* message) {
    const Token& t = lexer_.current();
    if (t.kind != kind)
      throw ParseError(ErrorCode::syntax_error, t.offset, message);
    lexer_.advance();
  }

  Lexer lexer_;
  std::map<std::string, int> var_slots_;
};

inline bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace detail

/// Parse `source` over the declared variable list. Variable nodes are bound
/// to their slot in `variables`; unknown identifiers are rejected.
inline Ast parse(std::string_view source, std::span<const std::string> variables) {
  if (source.empty())
    throw ParseError(ErrorCode::syntax_error, 0, "empty expression");
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!detail::valid_identifier(variables[i]))
      throw Error(ErrorCode::invalid_argument,
                  "invalid variable name '" + variables[i] + "'");
    Func fn;
    if (detail::lookup_func(variables[i], fn))
      throw Error(ErrorCode::invalid_argument,
                  "variable name '" + variables[i] + "' shadows a function");
    for (std::size_t j = i + 1; j < variables.size(); ++j)
      if (variables[i] == variables[j])
        throw Error(ErrorCode::invalid_argument,
                    "duplicate variable name '" + variables[i] + "'");
  }
  detail::Parser parser(source, variables);
  return parser.parse_all();
}

inline Ast parse(std::string_view source, std::initializer_list<std::string> variables) {
  std::vector<std::string> v(variables);
  return parse(source, std::span<const std::string>(v));
}

namespace detail {

// Folding constructors used by the differentiator: constant folding plus
// zero/one elimination, nothing fancier.

inline Ast fold_negate(Ast a) {
  if (a->kind == NodeKind::constant) return make_constant(-a->value);
  return make_negate(std::move(a));
}

inline Ast fold_add(Ast a, Ast b) {
  if (is_constant(a, 0.0)) return b;
  if (is_constant(b, 0.0)) return a;
  Ast n = make_binary(BinaryOp::add, std::move(a), std::move(b));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

inline Ast fold_sub(Ast a, Ast b) {
  if (is_constant(b, 0.0)) return a;
  if (is_constant(a, 0.0)) return fold_negate(std::move(b));
  Ast n = make_binary(BinaryOp::sub, std::move(a), std::move(b));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

inline Ast fold_mul(Ast a, Ast b) {
  if (is_constant(a, 0.0) || is_constant(b, 0.0)) return make_constant(0.0);
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  Ast n = make_binary(BinaryOp::mul, std::move(a), std::move(b));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

inline Ast fold_div(Ast a, Ast b) {
  if (is_constant(a, 0.0)) return make_constant(0.0);
  if (is_constant(b, 1.0)) return a;
  Ast n = make_binary(BinaryOp::div, std::move(a), std::move(b));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

inline Ast fold_pow(Ast base, double exponent) {
  if (exponent == 0.0) return make_constant(1.0);
  if (exponent == 1.0) return base;
  Ast n = make_binary(BinaryOp::pow, std::move(base), make_constant(exponent));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

inline Ast fold_call(Func fn, Ast a) {
  Ast n = make_call(fn, std::move(a));
  if (Ast c = try_fold_constant(n)) return c;
  return n;
}

}  // namespace detail

/// Exact partial derivative with respect to `var`. The result is simplified
/// only by constant folding and zero/one elimination. abs differentiates to
/// sign (sign(0) = 0); sign differentiates to 0, its a.e. derivative.
inline Ast differentiate(const Ast& ast, std::string_view var) {
  using namespace detail;
  switch (ast->kind) {
    case NodeKind::constant:
      return make_constant(0.0);
    case NodeKind::variable:
      return make_constant(ast->name == var ? 1.0 : 0.0);
    case NodeKind::negate:
      return fold_negate(differentiate(ast->lhs, var));
    case NodeKind::binary: {
      switch (ast->op) {
        case BinaryOp::add:
          return fold_add(differentiate(ast->lhs, var), differentiate(ast->rhs, var));
        case BinaryOp::sub:
          return fold_sub(differentiate(ast->lhs, var), differentiate(ast->rhs, var));
        case BinaryOp::mul:
          return fold_add(fold_mul(differentiate(ast->lhs, var), ast->rhs),
                          fold_mul(ast->lhs, differentiate(ast->rhs, var)));
        case BinaryOp::div:
          return fold_div(
              fold_sub(fold_mul(differentiate(ast->lhs, var), ast->rhs),
                       fold_mul(ast->lhs, differentiate(ast->rhs, var))),
              fold_pow(ast->rhs, 2.0));
        case BinaryOp::pow: {
          if (ast->rhs->kind != NodeKind::constant)
            throw Error(ErrorCode::non_constant_exponent,
                        "pow exponent must be a constant node");
          const double c = ast->rhs->value;
          return fold_mul(fold_mul(make_constant(c), fold_pow(ast->lhs, c - 1.0)),
                          differentiate(ast->lhs, var));
        }
      }
      return nullptr;
    }
    case NodeKind::call: {
      Ast du = differentiate(ast->lhs, var);
      switch (ast->fn) {
        case Func::sin:
          return fold_mul(fold_call(Func::cos, ast->lhs), std::move(du));
        case Func::cos:
          return fold_mul(fold_negate(fold_call(Func::sin, ast->lhs)), std::move(du));
        case Func::exp:
          return fold_mul(fold_call(Func::exp, ast->lhs), std::move(du));
        case Func::tanh:
          return fold_mul(
              fold_sub(make_constant(1.0), fold_pow(fold_call(Func::tanh, ast->lhs), 2.0)),
              std::move(du));
        case Func::sqrt:
          return fold_div(std::move(du),
                          fold_mul(make_constant(2.0), fold_call(Func::sqrt, ast->lhs)));
        case Func::abs:
          return fold_mul(fold_call(Func::sign, ast->lhs), std::move(du));
        case Func::sign:
          return make_constant(0.0);
      }
      return nullptr;
    }
  }
  return nullptr;
}

/// Jacobian matrix of symbolic partials: entry (i,j) = d rhs_i / d variables_j.
inline std::vector<std::vector<Ast>> jacobian(std::span<const Ast> rhs,
                                              std::span<const std::string> variables) {
  std::vector<std::vector<Ast>> out(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    out[i].reserve(variables.size());
    for (const auto& v : variables) out[i].push_back(differentiate(rhs[i], v));
  }
  return out;
}

namespace detail {

inline int precedence(const Ast& a) {
  switch (a->kind) {
    case NodeKind::constant:
      return a->value < 0.0 ? 3 : 5;  // negative literals print a leading '-'
    case NodeKind::variable:
    case NodeKind::call:
      return 5;
    case NodeKind::negate:
      return 3;
    case NodeKind::binary:
      switch (a->op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
  }
  return 5;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void render_into(const Ast& a, std::string& out);

inline void render_child(const Ast& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    render_into(child, out);
    out += ')';
  } else {
    render_into(child, out);
  }
}

inline void render_into(const Ast& a, std::string& out) {
  switch (a->kind) {
    case NodeKind::constant:
      out += format_double(a->value);
      return;
    case NodeKind::variable:
      out += a->name;
      return;
    case NodeKind::negate:
      out += '-';
      render_child(a->lhs, 3, out);
      return;
    case NodeKind::binary: {
      const char* sym = nullptr;
      int prec = 0;
      switch (a->op) {
        case BinaryOp::add: sym = " + "; prec = 1; break;
        case BinaryOp::sub: sym = " - "; prec = 1; break;
        case BinaryOp::mul: sym = " * "; prec = 2; break;
        case BinaryOp::div: sym = " / "; prec = 2; break;
        case BinaryOp::pow: sym = "^"; prec = 4; break;
      }
      if (a->op == BinaryOp::pow) {
        render_child(a->lhs, 5, out);  // base must be a primary
        out += sym;
        render_child(a->rhs, 3, out);
      } else {
        render_child(a->lhs, prec, out);
        out += sym;
        render_child(a->rhs, prec + 1, out);  // left-associative
      }
      return;
    }
    case NodeKind::call:
      out += func_name(a->fn);
      out += '(';
      render_into(a->lhs, out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// Infix rendering; re-parsing the result over the same variable list yields
/// a structurally identical tree.
inline std::string render(const Ast& ast) {
  std::string out;
  detail::render_into(ast, out);
  return out;
}

/// Names of the variables that actually occur in the tree.
inline void collect_variables(const Ast& ast, std::vector<std::string>& out) {
  switch (ast->kind) {
    case NodeKind::constant:
      return;
    case NodeKind::variable: {
      for (const auto& n : out)
        if (n == ast->name) return;
      out.push_back(ast->name);
      return;
    }
    case NodeKind::negate:
    case NodeKind::call:
      collect_variables(ast->lhs, out);
      return;
    case NodeKind::binary:
      collect_variables(ast->lhs, out);
      collect_variables(ast->rhs, out);
      return;
  }
}

}  // namespace veccontract::expr
