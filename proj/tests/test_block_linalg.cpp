#include "mvop/block_linalg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace mvop;
using namespace mvop::testing;

namespace {

using RMat = Matrix<Rational>;

BoxMeasure<Rational> square() { return BoxMeasure<Rational>({{-1, 1}, {-1, 1}}); }

RMat scalar_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  RMat m(static_cast<std::int64_t>(rows.size()), static_cast<std::int64_t>(rows.begin()->size()));
  std::int64_t i = 0;
  for (auto r : rows) {
    std::int64_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::vector<MeasurePtr<Rational>> test_measures() {
  return {
      std::make_shared<BoxMeasure<Rational>>(std::vector<std::pair<Rational, Rational>>{{-1, 1}, {-1, 1}}),
      std::make_shared<BoxMeasure<Rational>>(std::vector<std::pair<Rational, Rational>>{{0, 1}, {-1, 2}},
                                             rp("(2+x)*(1+y^2)", 2)),
      std::make_shared<BoxMeasure<Rational>>(std::vector<std::pair<Rational, Rational>>{{-1, 1}}),
  };
}

RMat reconstruct(const CholeskyResult<Rational>& c) {
  return c.s_inv.dense() * c.h_matrix().dense() * c.s_inv.dense().transpose();
}

}  // namespace

TEST(BlockLinalg, MomentMatrixExamples) {
  auto mu = square();
  auto g0 = build_moment_matrix(mu, 0);
  ASSERT_EQ(g0.dense().rows(), 1);
  EXPECT_EQ(g0.at(0, 0), 4);
  auto g1 = build_moment_matrix(mu, 1);
  EXPECT_EQ(g1.block(1, 1), RMat::identity(2) * q("4/3"));
  DiscreteMeasure<Rational> point({{0, 0}}, {1});
  auto gp = build_moment_matrix(point, 1);
  EXPECT_EQ(gp.at(0, 0), 1);
  EXPECT_EQ(rank(gp.dense()), 1);
}

TEST(BlockLinalg, CholeskyExamples) {
  auto basis = GradedBasis::make(2, 3);
  auto id = BlockMatrix<Rational>::identity(basis);
  auto ci = block_cholesky(id);
  EXPECT_EQ(ci.s.dense(), RMat::identity(basis->size()));
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(ci.h[static_cast<std::size_t>(k)], RMat::identity(basis->block_length(k)));

  auto c = block_cholesky(build_moment_matrix(square(), 2));
  EXPECT_EQ(c.h[0], RMat(1, 1, 4));
  EXPECT_EQ(c.h[1], RMat::identity(2) * q("4/3"));
}

TEST(BlockLinalg, CholeskyReportsSingularBlock) {
  DiscreteMeasure<Rational> two({{0, 0}, {1, 1}}, {1, 1});
  try {
    (void)block_cholesky(build_moment_matrix(two, 2));
    FAIL() << "expected SingularBlock";
  } catch (const SingularBlock& e) {
    EXPECT_LE(e.degree, 2);
    EXPECT_EQ(std::string(e.what()), "singular block at degree " + std::to_string(e.degree));
  }
  DiscreteMeasure<Rational> one({{0, 0}}, {1});
  try {
    (void)block_cholesky(build_moment_matrix(one, 1));
    FAIL();
  } catch (const SingularBlock& e) {
    EXPECT_EQ(e.degree, 1);
  }
}

TEST(BlockLinalg, LastQuasiDeterminantExamples) {
  EXPECT_EQ(last_quasi_determinant(scalar_matrix({{1, 0}, {0, 7}}), 1), scalar_matrix({{7}}));
  EXPECT_EQ(last_quasi_determinant(scalar_matrix({{2, 1}, {1, 1}}), 1), RMat(1, 1, q("1/2")));
  auto g = build_moment_matrix(square(), 1);
  EXPECT_EQ(last_quasi_determinant(g.leading(2), 2), RMat::identity(2) * q("4/3"));
  EXPECT_THROW(last_quasi_determinant(scalar_matrix({{0, 1}, {1, 1}}), 1), SingularMatrix);
}

TEST(BlockLinalg, InvertUnitriangularExamples) {
  auto basis = GradedBasis::make(2, 3);
  auto id = BlockMatrix<Rational>::identity(basis);
  EXPECT_EQ(invert_unitriangular(id).dense(), id.dense());
  auto s = id;
  s.set_block(1, 0, RMat::column({q("2/3"), -5}));
  auto inv = invert_unitriangular(s);
  EXPECT_EQ(inv.block(1, 0), RMat::column({q("-2/3"), 5}));

  std::mt19937_64 rng(3);
  auto r = id;
  for (int k = 1; k <= 3; ++k)
    for (int l = 0; l < k; ++l) {
      RMat b(basis->block_length(k), basis->block_length(l));
      for (std::int64_t i = 0; i < b.rows(); ++i)
        for (std::int64_t j = 0; j < b.cols(); ++j) b(i, j) = qr(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 4));
      r.set_block(k, l, b);
    }
  EXPECT_EQ((r * invert_unitriangular(r)).dense(), RMat::identity(basis->size()));
  auto bad = id;
  bad.set_block(0, 1, RMat(1, 2, 1));
  EXPECT_THROW(invert_unitriangular(bad), Error);
}

TEST(BlockLinalg, SliceSExamples) {
  auto c = block_cholesky(build_moment_matrix(square(), 4));
  auto s02 = slice_s(c, 0, 2);
  EXPECT_EQ(s02.rows(), 3);
  EXPECT_EQ(s02.cols(), 3);
  EXPECT_EQ(s02, RMat::identity(3));
  auto s11 = slice_s(c, 1, 1);
  EXPECT_EQ(s11.rows(), 2);
  EXPECT_EQ(s11.cols(), 3);
  EXPECT_TRUE(s11.block(0, 0, 2, 1).is_exactly_zero());
  EXPECT_EQ(s11.block(0, 1, 2, 2), RMat::identity(2));
  auto s12 = slice_s(c, 1, 2);
  EXPECT_EQ(s12.block(0, 1, 5, 5), c.s.blocks(1, 2, 1, 2));
  EXPECT_THROW(slice_s(c, 3, 3), DegreeOverflow);

  auto idc = block_cholesky(BlockMatrix<Rational>::identity(GradedBasis::make(2, 3)));
  auto s = slice_s(idc, 1, 2);
  EXPECT_TRUE(s.block(0, 0, 5, 1).is_exactly_zero());
  EXPECT_EQ(s.block(0, 1, 5, 5), RMat::identity(5));
}

TEST(BlockLinalg, BandAndValidityBookkeeping) {
  auto basis = GradedBasis::make(2, 4);
  auto a = BlockMatrix<Rational>::identity(basis);
  a.set_bands(0, 1);
  auto b = a * a;
  EXPECT_EQ(b.upper_band(), 2);
  EXPECT_EQ(b.lower_band(), 0);
  EXPECT_EQ(b.valid_degree(), 3);
  EXPECT_EQ((b * a).valid_degree(), 2);
  EXPECT_EQ((a + b).valid_degree(), 3);
}

TEST(BlockLinalgProperty, ReconstructionExact) {
  for (const auto& mu : test_measures())
    for (int L = 0; L <= (mu->dimension() == 1 ? 6 : 5); ++L) {
      auto g = build_moment_matrix(*mu, L);
      auto c = block_cholesky(g);
      EXPECT_EQ(reconstruct(c), g.dense()) << "L=" << L;
      EXPECT_EQ((c.s * c.s_inv).dense(), RMat::identity(g.basis()->size()));
    }
}

TEST(BlockLinalgProperty, HIsLastQuasiDeterminant) {
  for (const auto& mu : test_measures()) {
    auto g = build_moment_matrix(*mu, 5);
    auto c = block_cholesky(g);
    for (int k = 0; k <= 5; ++k)
      EXPECT_EQ(c.h[static_cast<std::size_t>(k)], last_quasi_determinant(g.leading(k + 1), g.basis()->block_length(k)));
  }
}

TEST(BlockLinalgProperty, HPositiveDefiniteForPositiveMeasures) {
  for (const auto& mu : test_measures()) {
    auto c = block_cholesky(build_moment_matrix(*mu, 4));
    for (const auto& h : c.h) {
      EXPECT_EQ(h, h.transpose());
      for (std::int64_t n = 1; n <= h.rows(); ++n) EXPECT_GT(determinant(h.block(0, 0, n, n)), 0);
    }
  }
}

TEST(BlockLinalgProperty, DetHInvariantUnderWithinBlockPermutation) {
  auto mu = test_measures()[1];
  auto g = build_moment_matrix(*mu, 4);
  const auto& basis = g.basis();
  // reverse the order inside every degree block
  std::vector<std::int64_t> perm(static_cast<std::size_t>(basis->size()));
  for (int k = 0; k <= 4; ++k) {
    auto off = basis->block_offset(k), len = basis->block_length(k);
    for (std::int64_t i = 0; i < len; ++i) perm[static_cast<std::size_t>(off + i)] = off + len - 1 - i;
  }
  RMat pg(basis->size(), basis->size());
  for (std::int64_t i = 0; i < basis->size(); ++i)
    for (std::int64_t j = 0; j < basis->size(); ++j)
      pg(i, j) = g.at(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  auto c1 = block_cholesky(g);
  auto c2 = block_cholesky(BlockMatrix<Rational>(basis, pg));
  for (int k = 0; k <= 4; ++k) {
    const auto& h1 = c1.h[static_cast<std::size_t>(k)];
    EXPECT_EQ(determinant(h1), determinant(c2.h[static_cast<std::size_t>(k)]));
    if (h1.rows() > 1) EXPECT_NE(h1, c2.h[static_cast<std::size_t>(k)]);
  }
}

TEST(BlockLinalgProperty, FloatReconstruction) {
  BoxMeasure<double> mu({{-1.0, 1.0}, {0.0, 2.0}}, parse_poly<double>("1 + x^2", 2));
  auto g = build_moment_matrix(mu, 5);
  auto c = block_cholesky(g);
  auto r = c.s_inv.dense() * c.h_matrix().dense() * c.s_inv.dense().transpose();
  EXPECT_LE(max_deviation(r, g.dense()), 1e-12 * g.dense().max_abs());
}
