#include "mvop/poly.hpp"
#include "mvop/poly_io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mvop;
using namespace mvop::testing;

TEST(Poly, EvalExamples) {
  auto circle = rp("x^2 + y^2 - 4", 2);
  EXPECT_EQ(circle({q("2"), q("0")}), 0);
  EXPECT_EQ(rp("1", 2)({q("3/7"), q("-5")}), 1);
  EXPECT_EQ(rp("(2-x)*(2-y)", 2)({q("1"), q("1")}), 1);
}

TEST(Poly, MulExamples) {
  EXPECT_EQ(rp("2-x", 2) * rp("2-y", 2), rp("4 - 2*x - 2*y + x*y", 2));
  auto p = rp("3*x^2*y - 1/2", 2);
  EXPECT_EQ(p * rp("1", 2), p);
  EXPECT_EQ(power(rp("2-x", 2), 2), rp("4 - 4*x + x^2", 2));
}

TEST(Poly, DirectionalDerivativeExamples) {
  auto dx = Direction<Rational>::coordinate(2, 0, 1);
  EXPECT_EQ(directional_derivative(rp("x^2*y", 2), dx), rp("2*x*y", 2));
  auto d = directional_derivative(rp("(2-x)^2", 2), dx);
  EXPECT_EQ(d, rp("-2*(2-x)", 2));
  EXPECT_EQ(d({q("2"), q("5/3")}), 0);
  // mixed second derivative: block [2] is (2,0),(1,1),(0,2)
  auto mixed = Direction<Rational>::from_coefficients(2, 2, {0, 1, 0});
  EXPECT_EQ(directional_derivative(rp("x^2*y^2", 2), mixed), rp("4*x*y", 2));
  EXPECT_EQ(directional_derivative(rp("x*y", 2), Direction<Rational>::identity(2)), rp("x*y", 2));
  EXPECT_TRUE(directional_derivative(rp("x + y", 2), mixed).is_zero());
}

TEST(Poly, DirectionValidation) {
  EXPECT_THROW(Direction<Rational>::from_coefficients(2, 1, {1, 0, 0}), DimensionMismatch);
  EXPECT_THROW(Direction<Rational>::from_coefficients(2, 1, {0, 0}), Error);
}

TEST(Poly, ExpandFactoredExamples) {
  std::vector<Factor<Rational>> f1{{rp("2-x", 2), 1}, {rp("2-y", 2), 1}};
  auto q1 = expand_factored<Rational>(f1, 2);
  EXPECT_EQ(q1, rp("4 - 2*x - 2*y + x*y", 2));
  EXPECT_EQ(q1.degree(), 2);
  std::vector<Factor<Rational>> f2{{rp("2-x", 2), 2}};
  EXPECT_EQ(expand_factored<Rational>(f2, 2), rp("4 - 4*x + x^2", 2));
  std::vector<Factor<Rational>> f3{{rp("x^2+y^2+1", 2), 1}};
  EXPECT_EQ(expand_factored<Rational>(f3, 2), rp("x^2+y^2+1", 2));
}

TEST(Poly, ZeroPolynomialDegreeSentinel) {
  MPoly<Rational> z(2);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.degree(), MPoly<Rational>::kZeroDegree);
  EXPECT_EQ(format_poly(z), "0");
}

TEST(Poly, DivisionExactAndRemainder) {
  auto qq = rp("(2-x)*(2-y)", 2);
  auto p = rp("x^2*y - 3*x + 1/2", 2);
  auto res = divide(p * qq, qq);
  EXPECT_EQ(res.quotient, p);
  EXPECT_TRUE(res.remainder.is_zero());
  auto r2 = divide(rp("x^2 + 1", 2), rp("x - 1", 2));
  EXPECT_EQ(r2.quotient, rp("x + 1", 2));
  EXPECT_EQ(r2.remainder, rp("2", 2));
}

TEST(PolyIO, CanonicalFormatting) {
  EXPECT_EQ(format_poly(rp("(2-x)*(2-y)", 2)), "4 - 2*x1 - 2*x2 + x1*x2");
  EXPECT_EQ(format_poly(rp("x^2 - 1/3", 2)), "-1/3 + x1^2");
  EXPECT_EQ(format_poly(rp("-x2^3*x1", 2)), "-x1*x2^3");
  EXPECT_EQ(format_poly(rp("0.25*x", 1)), "1/4*x1");
}

TEST(PolyIO, ParseErrors) {
  EXPECT_THROW(rp("x +", 2), ParseError);
  EXPECT_THROW(rp("z", 2), ParseError);
  EXPECT_THROW(rp("x3", 2), ParseError);
  EXPECT_THROW(rp("(x", 2), ParseError);
}

TEST(PolyIO, ComplexLiterals) {
  auto p = parse_poly<ComplexRational>("(0,1)*x + (1/2,-3)", 1);
  std::vector<ComplexRational> pt{ComplexRational{0, 1}};
  EXPECT_EQ(p(pt), (ComplexRational{qr(-1, 2), -3}));
  EXPECT_EQ(parse_poly<ComplexRational>(format_poly(p), 1), p);
}

class PolyProperty : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240601};
};

TEST_F(PolyProperty, FormatParseRoundTrip) {
  for (int i = 0; i < 200; ++i) {
    int d = 1 + static_cast<int>(rng() % 3);
    auto p = random_poly(rng, d, 4, 6);
    EXPECT_EQ(parse_poly<Rational>(format_poly(p), d), p) << format_poly(p);
  }
}

TEST_F(PolyProperty, MulCommutativeAssociative) {
  for (int i = 0; i < 50; ++i) {
    auto a = random_poly(rng, 2, 3, 4), b = random_poly(rng, 2, 3, 4), c = random_poly(rng, 2, 2, 3);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST_F(PolyProperty, DerivativeLinearInPolyAndDirection) {
  for (int i = 0; i < 50; ++i) {
    auto p = random_poly(rng, 2, 4, 5), r = random_poly(rng, 2, 4, 5);
    int j = 1 + static_cast<int>(rng() % 2);
    auto n1 = Direction<Rational>::from_coefficients(2, j, std::vector<Rational>(static_cast<std::size_t>(j + 1), 1));
    std::vector<Rational> c2(static_cast<std::size_t>(j + 1));
    for (auto& c : c2) c = qr(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
    c2[0] = 5;
    auto n2 = Direction<Rational>::from_coefficients(2, j, c2);
    Rational s = qr(3, 7);
    EXPECT_EQ(directional_derivative(p * s + r, n1), directional_derivative(p, n1) * s + directional_derivative(r, n1));
    std::vector<Rational> csum(c2.size());
    for (std::size_t t = 0; t < c2.size(); ++t) csum[t] = n1.coefficients[t] + c2[t];
    auto nsum = Direction<Rational>::from_coefficients(2, j, csum);
    EXPECT_EQ(directional_derivative(p, nsum), directional_derivative(p, n1) + directional_derivative(p, n2));
  }
}

TEST_F(PolyProperty, LowOrderDerivativesOfPowersVanishOnZeroSet) {
  // (2-x)^2 on x = 2
  auto line = rp("(2-x)^2", 2);
  auto dx = Direction<Rational>::coordinate(2, 0, 1);
  auto dy = Direction<Rational>::coordinate(2, 1, 1);
  for (int t = -5; t <= 5; ++t) {
    std::vector<Rational> p{2, qr(t, 3)};
    EXPECT_EQ(line(p), 0);
    EXPECT_EQ(directional_derivative(line, dx)(p), 0);
    EXPECT_EQ(directional_derivative(line, dy)(p), 0);
  }
  // (x^2+y^2-4)^2 at rational circle points (2(1-s^2), 4s)/(1+s^2)
  auto circ = power(rp("x^2 + y^2 - 4", 2), 2);
  for (int i = -6; i <= 6; ++i) {
    Rational s = qr(i, 4);
    std::vector<Rational> p{2 * (1 - s * s) / (1 + s * s), 4 * s / (1 + s * s)};
    auto n = Direction<Rational>::from_coefficients(2, 1, {qr(i, 5), 1});
    EXPECT_EQ(circ(p), 0);
    EXPECT_EQ(directional_derivative(circ, n)(p), 0);
  }
}

TEST_F(PolyProperty, ExpandFactoredDegreeBookkeeping) {
  for (int i = 0; i < 30; ++i) {
    std::vector<Factor<Rational>> fs;
    int expected = 0;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int a = 0; a < n; ++a) {
      auto r = random_poly(rng, 2, 2, 3);
      if (r.degree() < 1) r += rp("x", 2);
      int d = 1 + static_cast<int>(rng() % 2);
      expected += r.degree() * d;
      fs.push_back({r, d});
    }
    EXPECT_EQ(expand_factored<Rational>(fs, 2).degree(), expected);
  }
}
