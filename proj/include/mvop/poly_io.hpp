#pragma once

// Text format for polynomials.
//
// Printer (canonical): terms in graded order joined by " + " / " - ",
// each term `c*x1^a1*x2^a2...` with unit coefficients and unit exponents
// omitted; e.g. "4 - 2*x1 - 2*x2 + x1*x2", "-1/3 + x1^2".
// Complex coefficients print as "(re,im)".
//
// Parser: accepts the canonical form plus parentheses, products of
// sub-expressions and integer powers, and the aliases x, y, z, w for
// x1..x4, so "(2-x)*(2-y)" and "x^2 + y^2 - 4" both parse.

#include "mvop/errors.hpp"
#include "mvop/poly.hpp"

#include <cctype>
#include <string>
#include <string_view>

namespace mvop {

namespace detail {

template <Scalar T>
class PolyParser {
 public:
  PolyParser(std::string_view text, int dimension) : s_(text), dim_(dimension) {}

  MPoly<T> parse() {
    MPoly<T> p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in \"" +
                     std::string(s_) + "\"");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  MPoly<T> expr() {
    MPoly<T> acc(dim_);
    bool neg = accept('-');
    if (!neg) accept('+');
    while (true) {
      MPoly<T> t = term();
      if (neg) acc -= t;
      else acc += t;
      if (accept('+')) neg = false;
      else if (accept('-')) neg = true;
      else break;
    }
    return acc;
  }

  MPoly<T> term() {
    MPoly<T> acc = factor();
    while (accept('*')) acc *= factor();
    return acc;
  }

  MPoly<T> factor() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a factor");
    MPoly<T> base(dim_);
    char c = s_[pos_];
    if (c == '(') {
      // "(re,im)" complex literal or a parenthesized sub-expression
      auto close = s_.find(')', pos_);
      auto comma = s_.find(',', pos_);
      if (comma != std::string_view::npos && close != std::string_view::npos && comma < close &&
          s_.find('(', pos_ + 1) > close) {
        std::string lit(s_.substr(pos_, close - pos_ + 1));
        pos_ = close + 1;
        try { base = MPoly<T>::constant(dim_, parse_scalar<T>(lit)); }
        catch (const std::invalid_argument& e) { fail(e.what()); }
      } else {
        ++pos_;
        base = expr();
        if (!accept(')')) fail("expected ')'");
      }
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string lit = number();
      try { base = MPoly<T>::constant(dim_, parse_scalar<T>(lit)); }
      catch (const std::invalid_argument& e) { fail(e.what()); }
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      base = MPoly<T>::variable(dim_, variable());
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      base = power(base, std::stoi(std::string(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  std::string number() {
    std::size_t start = pos_;
    auto digits = [&] { while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_; };
    auto unsigned_real = [&] {
      digits();
      if (pos_ < s_.size() && s_[pos_] == '.') { ++pos_; digits(); }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        std::size_t exp_start = pos_;
        digits();
        if (exp_start == pos_) pos_ = save;  // not an exponent after all
      }
    };
    unsigned_real();
    if (pos_ < s_.size() && s_[pos_] == '/' && pos_ + 1 < s_.size() &&
        std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      unsigned_real();
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  int variable() {
    char c = s_[pos_++];
    if (c == 'x' && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      int idx = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (idx < 1 || idx > dim_) fail("variable x" + std::to_string(idx) + " outside dimension " + std::to_string(dim_));
      return idx - 1;
    }
    int axis = -1;
    switch (c) {
      case 'x': axis = 0; break;
      case 'y': axis = 1; break;
      case 'z': axis = 2; break;
      case 'w': axis = 3; break;
      default: --pos_; fail(std::string("unknown variable '") + c + "'");
    }
    if (axis >= dim_) { --pos_; fail(std::string("variable '") + c + "' outside dimension " + std::to_string(dim_)); }
    return axis;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int dim_;
};

inline std::string monomial_string(const MultiIndex& a) {
  std::string s;
  for (int i = 0; i < a.dimension(); ++i) {
    if (a[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (a[i] > 1) s += "^" + std::to_string(a[i]);
  }
  return s;
}

}  // namespace detail

template <Scalar T>
MPoly<T> parse_poly(std::string_view text, int dimension) {
  return detail::PolyParser<T>(text, dimension).parse();
}

template <Scalar T>
std::string format_poly(const MPoly<T>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [a, c] : p.terms()) {
    bool neg = ScalarTraits<T>::is_negative(c);
    T mag = neg ? T(-c) : c;
    if (first) out += neg ? "-" : "";
    else out += neg ? " - " : " + ";
    first = false;
    std::string mono = detail::monomial_string(a);
    bool unit = mag == T(1);
    if (mono.empty()) out += to_string(mag);
    else if (unit) out += mono;
    else out += to_string(mag) + "*" + mono;
  }
  return out;
}

}  // namespace mvop
