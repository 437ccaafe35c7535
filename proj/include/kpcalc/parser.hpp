#pragma once

// Text syntax for expressions and operators:
//   u, u', u''        jets
//   J(e), E(e)        antiderivative, exp-integral
//   del, del^k        ∂ and its powers
//   dinv(a, b)        a ∂⁻¹ b
//   inv(del - b)      (∂ - b)⁻¹
//   + - * / ^ ( )     with integer literals; '/' only by units

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "psido.hpp"

namespace kpcalc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        message_(msg),
        line_(line),
        column_(column) {}
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

/// Either a function (DiffExpr) or an operator (PsiDO).
using ParsedValue = std::variant<DiffExpr, PsiDO>;

namespace detail {

class Parser {
 public:
  Parser(ContextPtr ctx, std::string_view src) : ctx_(std::move(ctx)), src_(src) {}

  ParsedValue parse() {
    ParsedValue v = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  PsiDO as_op(const ParsedValue& v) const {
    if (auto* f = std::get_if<DiffExpr>(&v)) return PsiDO::function(ctx_, *f);
    return std::get<PsiDO>(v);
  }
  DiffExpr as_fn(const ParsedValue& v, const char* where) {
    if (auto* f = std::get_if<DiffExpr>(&v)) return *f;
    fail(std::string(where) + " expects a function, got an operator");
  }

  ParsedValue combine(const ParsedValue& a, const ParsedValue& b, char op) {
    if (std::holds_alternative<DiffExpr>(a) && std::holds_alternative<DiffExpr>(b)) {
      const auto& x = std::get<DiffExpr>(a);
      const auto& y = std::get<DiffExpr>(b);
      switch (op) {
        case '+': return x + y;
        case '-': return x - y;
        default: return x * y;
      }
    }
    PsiDO x = as_op(a), y = as_op(b);
    switch (op) {
      case '+': return x + y;
      case '-': return x - y;
      default: return x * y;
    }
  }

  ParsedValue expr() {
    ParsedValue v = term();
    for (;;) {
      if (accept('+'))
        v = combine(v, term(), '+');
      else if (accept('-'))
        v = combine(v, term(), '-');
      else
        return v;
    }
  }

  ParsedValue term() {
    ParsedValue v = unary();
    for (;;) {
      if (accept('*')) {
        v = combine(v, unary(), '*');
      } else if (accept('/')) {
        const std::size_t at = pos_;
        ParsedValue d = unary();
        auto* den = std::get_if<DiffExpr>(&d);
        if (!den || !is_unit(*den, *ctx_)) {
          pos_ = at;
          fail("division by a non-unit");
        }
        v = combine(v, unit_inverse(*den, *ctx_), '*');
      } else {
        return v;
      }
    }
  }

  ParsedValue unary() {
    if (accept('-')) {
      ParsedValue v = unary();
      if (auto* f = std::get_if<DiffExpr>(&v)) return -*f;
      return -std::get<PsiDO>(v);
    }
    if (accept('+')) return unary();
    return power();
  }

  ParsedValue power() {
    ParsedValue base = primary();
    if (!accept('^')) return base;
    skip_ws();
    bool neg = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    const long n = std::stol(std::string(src_.substr(start, pos_ - start)));
    if (auto* f = std::get_if<DiffExpr>(&base)) {
      DiffExpr b = *f;
      if (neg) {
        if (!is_unit(b, *ctx_)) fail("negative power of a non-unit");
        b = unit_inverse(b, *ctx_);
      }
      return pow(b, static_cast<unsigned>(n));
    }
    if (neg) fail("negative operator power; use dinv or inv");
    return kpcalc::power(std::get<PsiDO>(base), static_cast<unsigned>(n));
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  // Postfix ' on a parenthesized function differentiates it.
  ParsedValue primes(ParsedValue v) {
    while (pos_ < src_.size() && src_[pos_] == '\'') {
      auto* f = std::get_if<DiffExpr>(&v);
      if (!f) fail("' applies to functions only");
      *f = differentiate(*f);
      ++pos_;
    }
    return v;
  }

  ParsedValue primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ParsedValue v = expr();
      expect(')');
      return primes(std::move(v));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return DiffExpr(Rational(std::string(src_.substr(start, pos_ - start))));
    }
    const std::size_t at = pos_;
    const std::string name = identifier();
    if (name.empty()) fail("unexpected '" + std::string(1, c) + "'");
    if (name == "del") return PsiDO::del(ctx_);
    if (name == "dinv") {
      expect('(');
      DiffExpr a = as_fn(expr(), "dinv");
      expect(',');
      DiffExpr b = as_fn(expr(), "dinv");
      expect(')');
      return PsiDO::dyad(ctx_, a, b);
    }
    if (name == "inv") {
      expect('(');
      PsiDO f = as_op(expr());
      expect(')');
      if (!f.is_differential() || f.order() != 1 || f.coeff(1) != DiffExpr(1))
        fail("inv() accepts only monic linear factors del - b");
      return invert_monic_linear(ctx_, -f.coeff(0));
    }
    if (name == "J" || name == "E") {
      expect('(');
      DiffExpr a = as_fn(expr(), name.c_str());
      expect(')');
      return primes(name == "J" ? antiderivative(*ctx_, a) : DiffExpr::exp_integral(a));
    }
    auto g = ctx_->find(name);
    if (!g) {
      pos_ = at;
      fail("unknown generator '" + name + "'");
    }
    std::uint32_t order = 0;
    while (pos_ < src_.size() && src_[pos_] == '\'') {
      ++order;
      ++pos_;
    }
    return DiffExpr::jet(*g, order);
  }

  ContextPtr ctx_;
  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParsedValue parse_expression(const ContextPtr& ctx, std::string_view src) {
  return detail::Parser(ctx, src).parse();
}

inline DiffExpr parse_function(const ContextPtr& ctx, std::string_view src) {
  auto v = parse_expression(ctx, src);
  if (auto* f = std::get_if<DiffExpr>(&v)) return *f;
  throw ParseError("expected a function, got an operator", 1, 1);
}

inline PsiDO parse_operator(const ContextPtr& ctx, std::string_view src) {
  auto v = parse_expression(ctx, src);
  if (auto* f = std::get_if<DiffExpr>(&v)) return PsiDO::function(ctx, *f);
  return std::get<PsiDO>(v);
}

/// Identifiers used as generators in src (reserved words excluded).
inline std::set<std::string> scan_identifiers(std::string_view src) {
  std::set<std::string> out;
  std::size_t i = 0;
  while (i < src.size()) {
    if (std::isalpha(static_cast<unsigned char>(src[i])) || src[i] == '_') {
      const std::size_t s = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      std::string id(src.substr(s, i - s));
      if (!Context::is_reserved(id)) out.insert(id);
    } else if (std::isdigit(static_cast<unsigned char>(src[i]))) {
      while (i < src.size() && std::isalnum(static_cast<unsigned char>(src[i]))) ++i;
    } else {
      ++i;
    }
  }
  return out;
}

inline std::string to_string(const ParsedValue& v, const Context& ctx) {
  if (auto* f = std::get_if<DiffExpr>(&v)) return to_string(*f, ctx);
  return to_string(std::get<PsiDO>(v));
}

}  // namespace kpcalc
