#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "numeric.hpp"

namespace tce {

// Evaluates small real expressions such as "pi/7", "17pi/28-0.5" or
// "sqrt(2)/2" at a given precision. Supported: decimal literals, pi,
// sqrt(...), + - * /, parentheses, and implicit multiplication ("3pi").
class RealExpression {
 public:
  static Real evaluate(std::string_view text, unsigned bits) {
    PrecisionScope scope(bits);
    RealExpression parser(text);
    Real value = parser.expr();
    parser.skip_space();
    if (parser.pos_ != parser.text_.size()) parser.fail("unexpected trailing input");
    return value;
  }

 private:
  explicit RealExpression(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidParameters("cannot parse expression '" + std::string(text_) + "' at offset " +
                            std::to_string(pos_) + ": " + what);
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

  bool starts_primary() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  Real expr() {
    Real value = term();
    for (;;) {
      if (accept('+'))
        value += term();
      else if (accept('-'))
        value -= term();
      else
        return value;
    }
  }

  Real term() {
    Real value = unary();
    for (;;) {
      if (accept('*')) {
        value *= unary();
      } else if (accept('/')) {
        Real d = unary();
        if (d == 0) fail("division by zero");
        value /= d;
      } else if (starts_primary()) {
        value *= primary();
      } else {
        return value;
      }
    }
  }

  Real unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  Real primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Real value = expr();
      if (!accept(')')) fail("expected ')'");
      return value;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "pi") return pi();
      if (name == "sqrt") {
        if (!accept('(')) fail("expected '(' after sqrt");
        Real arg = expr();
        if (!accept(')')) fail("expected ')'");
        if (arg < 0) fail("sqrt of a negative number");
        return mp::sqrt(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  static Real pi() {
    Real v;
    mpfr_const_pi(v.backend().data(), MPFR_RNDN);
    return v;
  }

  Real number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // "2e" followed by something else: not an exponent
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    if (literal.find_first_of("0123456789") == std::string::npos || std::count(literal.begin(), literal.end(), '.') > 1)
      fail("malformed number '" + literal + "'");
    return Real(literal);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Real evaluate_expression(std::string_view text, unsigned bits) {
  return RealExpression::evaluate(text, bits);
}

}  // namespace tce
