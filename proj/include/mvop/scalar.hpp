#pragma once

// Scalar field plumbing: exact rationals (GMP), doubles, and complex numbers
// over either. Everything else in the library is templated on one of these.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace mvop {

using Rational = mpq_class;

/// Minimal complex number over an exact field. std::complex is only specified
/// for float, double and long double, so exact complex arithmetic gets its own type.
template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(const T& r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const T& r, const T& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    T i = re * o.im + im * o.re;
    re = r;
    im = i;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    if (den == 0) throw std::domain_error("complex division by zero");
    T r = (re * o.re + im * o.im) / den;
    T i = (im * o.re - re * o.im) / den;
    re = r;
    im = i;
    return *this;
  }
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

using ComplexRational = Complex<Rational>;
using ComplexDouble = std::complex<double>;

namespace detail {

inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Accepts "p", "p/q", decimals "1.25" and scientific "3e-2"; exact for Rational.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational a = parse_rational(s.substr(0, slash));
    Rational b = parse_rational(s.substr(slash + 1));
    if (b == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(a / b);
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') { neg = s[pos] == '-'; ++pos; }
  std::string mant;
  long exp10 = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') { mant.push_back(c); seen_digit = true; if (seen_dot) --exp10; }
    else if (c == '.' && !seen_dot) seen_dot = true;
    else break;
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + s + "'");
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed number '" + s + "'");
    std::size_t used = 0;
    long e = 0;
    try { e = std::stol(s.substr(pos + 1), &used); }
    catch (const std::exception&) { throw std::invalid_argument("malformed exponent in '" + s + "'"); }
    if (used != s.size() - pos - 1) throw std::invalid_argument("malformed exponent in '" + s + "'");
    exp10 += e;
  }
  mpz_class num(mant, 10);
  if (neg) num = -num;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 >= 0 ? Rational(num * p10) : Rational(num, p10);
  r.canonicalize();
  return r;
}

inline double parse_double(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) return parse_double(s.substr(0, slash)) / parse_double(s.substr(slash + 1));
  std::size_t used = 0;
  double v = 0;
  try { v = std::stod(s, &used); }
  catch (const std::exception&) { throw std::invalid_argument("malformed number '" + s + "'"); }
  if (used != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  return v;
}

// "(re,im)" or a plain real literal.
template <class R, class ParseReal>
std::pair<R, R> parse_complex_parts(const std::string& s, ParseReal parse_real) {
  if (!s.empty() && s.front() == '(') {
    auto comma = s.find(',');
    if (comma == std::string::npos || s.back() != ')') throw std::invalid_argument("malformed complex '" + s + "'");
    return {parse_real(s.substr(1, comma - 1)), parse_real(s.substr(comma + 1, s.size() - comma - 2))};
  }
  return {parse_real(s), R(0)};
}

}  // namespace detail

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool complex = false;
  static constexpr const char* name = "rational";
  static Rational parse(const std::string& s) { return detail::parse_rational(s); }
  static std::string to_string(const Rational& v) { return v.get_str(); }
  static double magnitude(const Rational& v) { return std::fabs(v.get_d()); }
  static bool is_zero(const Rational& v, double /*tol*/ = 0) { return sgn(v) == 0; }
  static bool is_negative(const Rational& v) { return sgn(v) < 0; }
  static Rational real_part(const Rational& v) { return v; }
  static Rational imag_part(const Rational&) { return 0; }
  static Rational make(const Rational& re, const Rational& /*im*/) { return re; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr bool complex = false;
  static constexpr const char* name = "float";
  static double parse(const std::string& s) { return detail::parse_double(s); }
  static std::string to_string(double v) { return detail::format_double(v); }
  static double magnitude(double v) { return std::fabs(v); }
  static bool is_zero(double v, double tol = 0) { return std::fabs(v) <= tol; }
  static bool is_negative(double v) { return v < 0; }
  static double real_part(double v) { return v; }
  static double imag_part(double) { return 0; }
  static double make(double re, double /*im*/) { return re; }
};

template <>
struct ScalarTraits<ComplexRational> {
  static constexpr bool exact = true;
  static constexpr bool complex = true;
  static constexpr const char* name = "complex-rational";
  static ComplexRational parse(const std::string& s) {
    auto [re, im] = detail::parse_complex_parts<Rational>(s, detail::parse_rational);
    return {re, im};
  }
  static std::string to_string(const ComplexRational& v) {
    if (sgn(v.im) == 0) return v.re.get_str();
    return "(" + v.re.get_str() + "," + v.im.get_str() + ")";
  }
  static double magnitude(const ComplexRational& v) { return std::hypot(v.re.get_d(), v.im.get_d()); }
  static bool is_zero(const ComplexRational& v, double = 0) { return sgn(v.re) == 0 && sgn(v.im) == 0; }
  static bool is_negative(const ComplexRational& v) { return sgn(v.im) == 0 && sgn(v.re) < 0; }
  static Rational real_part(const ComplexRational& v) { return v.re; }
  static Rational imag_part(const ComplexRational& v) { return v.im; }
  static ComplexRational make(const Rational& re, const Rational& im) { return {re, im}; }
};

template <>
struct ScalarTraits<ComplexDouble> {
  static constexpr bool exact = false;
  static constexpr bool complex = true;
  static constexpr const char* name = "complex-float";
  static ComplexDouble parse(const std::string& s) {
    auto [re, im] = detail::parse_complex_parts<double>(s, detail::parse_double);
    return {re, im};
  }
  static std::string to_string(const ComplexDouble& v) {
    if (v.imag() == 0.0) return detail::format_double(v.real());
    return "(" + detail::format_double(v.real()) + "," + detail::format_double(v.imag()) + ")";
  }
  static double magnitude(const ComplexDouble& v) { return std::abs(v); }
  static bool is_zero(const ComplexDouble& v, double tol = 0) { return std::abs(v) <= tol; }
  static bool is_negative(const ComplexDouble& v) { return v.imag() == 0.0 && v.real() < 0; }
  static double real_part(const ComplexDouble& v) { return v.real(); }
  static double imag_part(const ComplexDouble& v) { return v.imag(); }
  static ComplexDouble make(double re, double im) { return {re, im}; }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

/// Real field underlying T (Rational for the exact variants, double otherwise).
template <Scalar T>
using RealOf = std::conditional_t<is_exact_v<T>, Rational, double>;

template <Scalar T>
T parse_scalar(const std::string& s) { return ScalarTraits<T>::parse(s); }

template <Scalar T>
std::string to_string(const T& v) { return ScalarTraits<T>::to_string(v); }

template <Scalar T>
double magnitude(const T& v) { return ScalarTraits<T>::magnitude(v); }

template <Scalar T>
bool is_zero(const T& v, double tol = 0) { return ScalarTraits<T>::is_zero(v, tol); }

/// Integer power by repeated squaring; exponent must be non-negative.
template <class T>
T ipow(T base, int e) {
  T result(1);
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

/// Lifts a real-field value into T.
template <Scalar T>
T from_real(const RealOf<T>& r) { return T(r); }

template <Scalar T>
T from_int(long v) {
  if constexpr (std::is_same_v<T, Rational>) return Rational(v);
  else if constexpr (std::is_same_v<T, ComplexRational>) return ComplexRational(Rational(v));
  else return T(static_cast<double>(v));
}

}  // namespace mvop
