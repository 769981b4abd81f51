#include "mvop/mvopr.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mvop;
using namespace mvop::testing;

namespace {

using RMat = Matrix<Rational>;
using Box = BoxMeasure<Rational>;

MeasurePtr<Rational> square() { return std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{-1, 1}, {-1, 1}}); }

MVOPRFamily<Rational> square_family(int L) { return MVOPRFamily<Rational>::from_measure(square(), L); }

}  // namespace

TEST(Mvopr, PolynomialBlockExamples) {
  auto fam = square_family(3);
  auto p0 = fam.polynomial_block(0);
  ASSERT_EQ(p0.size(), 1u);
  EXPECT_EQ(p0[0], rp("1", 2));
  auto p1 = fam.polynomial_block(1);
  EXPECT_EQ(p1[0], rp("x", 2));
  EXPECT_EQ(p1[1], rp("y", 2));
  auto p2 = fam.polynomial_block(2);
  EXPECT_EQ(p2[0], rp("x^2 - 1/3", 2));
  EXPECT_EQ(p2[1], rp("x*y", 2));
  EXPECT_EQ(p2[2], rp("y^2 - 1/3", 2));
  EXPECT_THROW(fam.polynomial_block(4), DegreeOverflow);
}

TEST(Mvopr, EvalStackExamples) {
  auto fam = square_family(3);
  EXPECT_EQ(fam.eval_stack({q("0"), q("0")}, 0, 1), (std::vector<Rational>{1, 0, 0}));
  EXPECT_EQ(fam.eval_stack({q("3/7"), q("-2")}, 0, 0), (std::vector<Rational>{1}));
  EXPECT_EQ(fam.eval_stack({q("1"), q("1")}, 2, 2), (std::vector<Rational>{q("2/3"), 1, q("2/3")}));
}

TEST(Mvopr, EvalStackMatchesPolynomialsAndDerivatives) {
  auto mu = std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{0, 1}, {-1, 2}}, rp("1 + x*y^2", 2));
  auto fam = MVOPRFamily<Rational>::from_measure(mu, 4);
  std::vector<Rational> x{q("2/5"), q("-7/3")};
  auto polys = fam.polynomials(4);
  auto n = Direction<Rational>::from_coefficients(2, 2, {q("1/2"), -3, 2});
  auto vals = fam.eval_stack(std::span<const Rational>(x), 0, 4, n);
  auto plain = fam.eval_stack(x, 0, 4);
  for (std::size_t i = 0; i < polys.size(); ++i) {
    EXPECT_EQ(plain[i], polys[i](x));
    EXPECT_EQ(vals[i], directional_derivative(polys[i], n)(x));
  }
}

TEST(Mvopr, ShiftExamples) {
  auto basis = GradedBasis::make(2, 4);
  auto lam = build_shift<Rational>(basis);
  EXPECT_EQ(apply_poly_to_shift(rp("1", 2), lam).dense(), RMat::identity(basis->size()));
  EXPECT_EQ(apply_poly_to_shift(rp("x", 2), lam).dense(), lam[0].dense());
  for (std::int64_t i = 0; i < basis->size(); ++i)
    for (std::int64_t j = 0; j < basis->size(); ++j) {
      bool hit = basis->multiindex_at(j) == basis->multiindex_at(i) + MultiIndex::unit(2, 1);
      EXPECT_EQ(lam[1].at(i, j), hit ? 1 : 0);
    }
}

TEST(Mvopr, ShiftSpectralProperty) {
  const int L = 5;
  auto basis = GradedBasis::make(2, L);
  auto qq = rp("(2-x)*(2-y)", 2);
  auto ql = apply_poly_to_shift(qq, build_shift<Rational>(basis));
  EXPECT_EQ(ql.valid_degree(), L - 2);
  EXPECT_EQ(ql.dense().block(0, 0, basis->block_offset(L - 1), basis->size()),
            shifted_coefficients(qq, *basis, basis->block_offset(L - 1), basis->size()));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    std::vector<Rational> x{qr(static_cast<long>(rng() % 19) - 9, 1 + static_cast<long>(rng() % 5)),
                            qr(static_cast<long>(rng() % 19) - 9, 1 + static_cast<long>(rng() % 5))};
    auto chi = monomial_column<Rational>(*basis, x, L, Direction<Rational>::identity(2));
    auto lhs = ql.dense() * RMat::column(chi);
    for (std::int64_t i = 0; i < basis->block_offset(L - 1); ++i) EXPECT_EQ(lhs(i, 0), qq(x) * chi[static_cast<std::size_t>(i)]);
  }
}

TEST(Mvopr, JacobiLegendre) {
  auto mu = std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{-1, 1}});
  auto fam = MVOPRFamily<Rational>::from_measure(mu, 6);
  auto j = build_jacobi(fam)[0];
  EXPECT_EQ(j.valid_degree(), 5);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(j.at(k, k - 1), qr(k * k, 4 * k * k - 1)) << k;
    EXPECT_EQ(j.at(k, k - 1), fam.h(k)(0, 0) / fam.h(k - 1)(0, 0));
    EXPECT_EQ(j.at(k - 1, k), 1);
    EXPECT_EQ(j.at(k, k), 0);
  }
}

TEST(Mvopr, JacobiOfIdentityMomentsIsShift) {
  auto basis = GradedBasis::make(2, 4);
  MVOPRFamily<Rational> fam(block_cholesky(BlockMatrix<Rational>::identity(basis)));
  auto j = build_jacobi(fam);
  auto lam = build_shift<Rational>(basis);
  for (int a = 0; a < 2; ++a) EXPECT_EQ(j[static_cast<std::size_t>(a)].dense(), lam[static_cast<std::size_t>(a)].dense());
}

TEST(Mvopr, JacobiTridiagonal) {
  auto fam = square_family(5);
  for (const auto& j : build_jacobi(fam)) EXPECT_EQ(j.band_violation(1, 1, j.valid_degree()), 0.0);
}

class MvoprProperty : public ::testing::Test {
 protected:
  std::vector<MeasurePtr<Rational>> measures{
      square(),
      std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{0, 1}, {-1, 2}}, rp("(2+x)*(1+y^2)", 2)),
      std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{-1, 1}, {0, 1}, {0, 2}}),
  };
};

TEST_F(MvoprProperty, ShiftsCommute) {
  auto basis = GradedBasis::make(3, 5);
  auto lam = build_shift<Rational>(basis);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      auto ab = lam[static_cast<std::size_t>(a)] * lam[static_cast<std::size_t>(b)];
      auto ba = lam[static_cast<std::size_t>(b)] * lam[static_cast<std::size_t>(a)];
      EXPECT_EQ(ab.dense(), ba.dense());
    }
}

TEST_F(MvoprProperty, ShiftSymmetryOfMomentMatrix) {
  for (const auto& mu : measures) {
    int L = mu->dimension() == 3 ? 3 : 5;
    auto g = build_moment_matrix(*mu, L);
    auto rows = g.basis()->block_offset(L);  // degrees <= L-1
    for (const auto& lam : build_shift<Rational>(g.basis())) {
      auto lhs = (lam * g).dense().block(0, 0, rows, rows);
      auto rhs = (g * lam.transpose()).dense().block(0, 0, rows, rows);
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST_F(MvoprProperty, OrthogonalityFromMoments) {
  for (const auto& mu : measures) {
    int L = mu->dimension() == 3 ? 3 : 5;
    auto fam = MVOPRFamily<Rational>::from_measure(mu, L);
    auto g = build_moment_matrix(*mu, L);
    auto sg = fam.s() * g;
    for (int k = 0; k <= L; ++k) {
      for (int l = 0; l < k; ++l) EXPECT_TRUE(sg.block(k, l).is_exactly_zero());
      EXPECT_EQ(sg.block(k, k), fam.h(k));
      // monic by blocks
      EXPECT_EQ(fam.s().block(k, k), RMat::identity(g.basis()->block_length(k)));
    }
  }
}

TEST_F(MvoprProperty, JacobiSymmetryAndBand) {
  for (const auto& mu : measures) {
    int L = mu->dimension() == 3 ? 3 : 5;
    auto fam = MVOPRFamily<Rational>::from_measure(mu, L);
    auto hm = fam.cholesky().h_matrix();
    auto rows = fam.basis()->block_offset(L);
    for (const auto& j : build_jacobi(fam)) {
      EXPECT_EQ(j.band_violation(1, 1, L - 1), 0.0);
      auto lhs = (j * hm).dense().block(0, 0, rows, rows);
      auto rhs = (hm * j.transpose()).dense().block(0, 0, rows, rows);
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST_F(MvoprProperty, PerturbedMomentsEqualShiftProduct) {
  const int L = 5;
  for (const auto& qq : {rp("(2-x)*(2-y)", 2), rp("(2-x)^2", 2), rp("3 + x*y - y^3", 2)}) {
    auto mu = measures[1];
    auto g = build_moment_matrix(*mu, L);
    auto tg = build_moment_matrix(*perturb(mu, qq), L);
    auto ql = apply_poly_to_shift(qq, build_shift<Rational>(g.basis()));
    auto rows = g.basis()->block_offset(L - qq.degree() + 1);
    EXPECT_EQ((ql * g).dense().block(0, 0, rows, g.basis()->size()), tg.dense().block(0, 0, rows, g.basis()->size()));
  }
}

TEST_F(MvoprProperty, TensorProductFamilies) {
  const int L = 5;
  auto wx = rp("2 + x", 1), wy = rp("1 + x", 1);
  auto mu2 = std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{-1, 1}, {0, 1}}, rp("(2+x)*(1+y)", 2));
  auto fx = MVOPRFamily<Rational>::from_measure(std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{-1, 1}}, wx), L);
  auto fy = MVOPRFamily<Rational>::from_measure(std::make_shared<Box>(std::vector<std::pair<Rational, Rational>>{{0, 1}}, wy), L);
  auto fam = MVOPRFamily<Rational>::from_measure(mu2, L);
  auto embed = [](const MPoly<Rational>& p, int axis) {
    MPoly<Rational> out(2);
    for (const auto& [a, c] : p.terms()) {
      MultiIndex b(2);
      b[axis] = a[0];
      out.add_term(b, c);
    }
    return out;
  };
  for (int k = 0; k <= L; ++k) {
    auto block = fam.polynomial_block(k);
    auto idx = block_indices(2, k);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto px = embed(fx.polynomial_block(idx[i][0])[0], 0);
      auto py = embed(fy.polynomial_block(idx[i][1])[0], 1);
      EXPECT_EQ(block[i], px * py) << "k=" << k << " i=" << i;
    }
  }
}
