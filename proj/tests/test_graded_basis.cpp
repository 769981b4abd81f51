#include "mvop/graded_basis.hpp"

#include <gtest/gtest.h>

using namespace mvop;

TEST(GradedBasis, BlockSizeExamples) {
  EXPECT_EQ(block_size(2, 3), 4);
  EXPECT_EQ(block_size(1, 7), 1);
  EXPECT_EQ(block_size(3, 2), 6);
}

TEST(GradedBasis, CumulativeDimExamples) {
  EXPECT_EQ(cumulative_dim(2, 3), 10);
  EXPECT_EQ(cumulative_dim(2, -1), 0);
  EXPECT_EQ(cumulative_dim(4, 2), 15);
}

TEST(GradedBasis, WindowSizeExamples) {
  EXPECT_EQ(window_size(2, 0, 2), 3);
  EXPECT_EQ(window_size(2, 1, 2), 5);
  EXPECT_EQ(window_size(3, 2, 1), 6);
}

TEST(GradedBasis, CompareExamples) {
  EXPECT_TRUE(std::is_lt(graded_compare({1, 0}, {0, 1})));
  EXPECT_TRUE(std::is_lt(graded_compare({1, 0}, {0, 2})));
  EXPECT_TRUE(std::is_gt(graded_compare({0, 2}, {1, 0})));
  EXPECT_TRUE(std::is_eq(graded_compare({2, 1}, {2, 1})));
  EXPECT_THROW((void)graded_compare({1, 0}, {1, 0, 0}), DimensionMismatch);
}

TEST(GradedBasis, BlockOrderIsLexDecreasing) {
  auto b = block_indices(2, 2);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], MultiIndex({2, 0}));
  EXPECT_EQ(b[1], MultiIndex({1, 1}));
  EXPECT_EQ(b[2], MultiIndex({0, 2}));
  auto c = block_indices(3, 1);
  EXPECT_EQ(c[0], MultiIndex({1, 0, 0}));
  EXPECT_EQ(c[2], MultiIndex({0, 0, 1}));
}

TEST(GradedBasis, ShiftedPositionExamples) {
  GradedBasis b2(2, 4);
  EXPECT_EQ(b2.shifted_position(MultiIndex({0, 0}), 0), b2.index_of({1, 0}));
  EXPECT_EQ(b2.shifted_position(MultiIndex({1, 1}), 1), b2.index_of({1, 2}));
  GradedBasis b3(3, 3);
  EXPECT_EQ(b3.shifted_position(MultiIndex({0, 0, 2}), 2), b3.index_of({0, 0, 3}));
  EXPECT_THROW((void)b3.shifted_position(MultiIndex({0, 0, 3}), 0), DegreeOverflow);
}

TEST(GradedBasis, CapacityErrorOnOverflow) {
  EXPECT_THROW((void)block_size(60, 60), CapacityError);
}

TEST(GradedBasisProperty, BlockSizesSumToCumulative) {
  for (int d = 1; d <= 4; ++d)
    for (int k = 0; k <= 8; ++k) {
      std::int64_t sum = 0;
      for (int j = 0; j <= k; ++j) sum += block_size(d, j);
      EXPECT_EQ(sum, cumulative_dim(d, k)) << "D=" << d << " k=" << k;
    }
}

TEST(GradedBasisProperty, WindowSizeBothWays) {
  for (int d = 1; d <= 4; ++d)
    for (int k = 0; k <= 6; ++k)
      for (int m = 1; m <= 6; ++m) {
        std::int64_t sum = 0;
        for (int j = k; j <= k + m - 1; ++j) sum += block_size(d, j);
        EXPECT_EQ(window_size(d, k, m), sum);
      }
}

TEST(GradedBasisProperty, IndexRoundTripAndLayout) {
  for (int d = 1; d <= 4; ++d) {
    GradedBasis b(d, 5);
    EXPECT_EQ(b.size(), cumulative_dim(d, 5));
    for (std::int64_t i = 0; i < b.size(); ++i) {
      EXPECT_EQ(b.index_of(b.multiindex_at(i)), i);
      if (i > 0) EXPECT_TRUE(std::is_lt(graded_compare(b.multiindex_at(i - 1), b.multiindex_at(i))));
    }
    for (int k = 0; k <= 5; ++k) {
      EXPECT_EQ(b.block_offset(k), cumulative_dim(d, k - 1));
      EXPECT_EQ(b.block_length(k), block_size(d, k));
      for (std::int64_t i = b.block_offset(k); i < b.block_offset(k + 1); ++i) EXPECT_EQ(b.degree_at(i), k);
    }
  }
}
