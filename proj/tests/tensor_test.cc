/*
 * Copyright 2026 The SFedV Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sfedv/tensor.h"

#include <random>

#include "gtest/gtest.h"
#include "test_util.h"

namespace sfedv {
namespace {

using ::sfedv::testing::ValueOrDie;

TEST(VecColumnsTest, SingleElement) {
  IntMatrix m = ValueOrDie(IntMatrix::FromRowMajor(1, 1, {7}));
  EXPECT_EQ(VecColumns(m), (std::vector<int64_t>{7}));
}

TEST(VecColumnsTest, StacksColumns) {
  IntMatrix m = ValueOrDie(IntMatrix::FromRowMajor(2, 2, {1, 2, 3, 4}));
  EXPECT_EQ(VecColumns(m), (std::vector<int64_t>{1, 3, 2, 4}));
}

TEST(VecColumnsTest, UnvecInverts) {
  std::mt19937_64 rng(7);
  for (size_t rows = 1; rows <= 5; ++rows) {
    for (size_t cols = 1; cols <= 5; ++cols) {
      IntMatrix m(rows, cols);
      for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) m(r, c) = static_cast<int64_t>(rng() % 100);
      }
      const std::vector<int64_t> v = VecColumns(m);
      EXPECT_EQ(ValueOrDie(UnvecColumns<int64_t>(v, rows, cols)), m);
    }
  }
  EXPECT_FALSE(UnvecColumns<int64_t>(std::vector<int64_t>{1, 2, 3}, 2, 2).ok());
}

TEST(MatrixTest, FromRowMajorRejectsBadShapes) {
  EXPECT_FALSE(IntMatrix::FromRowMajor(0, 1, {}).ok());
  EXPECT_FALSE(IntMatrix::FromRowMajor(2, 2, {1, 2, 3}).ok());
}

TEST(KronFlatTest, Examples) {
  EXPECT_EQ(ValueOrDie(KronFlat(0, 0, 5)), 0u);
  EXPECT_EQ(ValueOrDie(KronFlat(2, 3, 5)), 13u);
  EXPECT_FALSE(KronFlat(5, 0, 5).ok());
  EXPECT_FALSE(KronFlat(0, 5, 5).ok());
  EXPECT_FALSE(KronUnflat(25, 5).ok());
}

TEST(KronFlatTest, BijectionExhaustive) {
  for (uint64_t length = 1; length <= 8; ++length) {
    std::vector<bool> hit(length * length, false);
    for (uint64_t a = 0; a < length; ++a) {
      for (uint64_t b = 0; b < length; ++b) {
        const uint64_t flat = ValueOrDie(KronFlat(a, b, length));
        ASSERT_LT(flat, length * length);
        EXPECT_FALSE(hit[flat]);
        hit[flat] = true;
        EXPECT_EQ(ValueOrDie(KronUnflat(flat, length)), (KronIndex{a, b, flat}));
      }
    }
  }
}

TEST(DenseKronTest, Examples) {
  EXPECT_EQ(ValueOrDie(DenseKron(std::vector<int64_t>{1})),
            (std::vector<WideInt>{1}));
  EXPECT_EQ(ValueOrDie(DenseKron(std::vector<int64_t>{2, 3})),
            (std::vector<WideInt>{4, 6, 6, 9}));
  EXPECT_FALSE(DenseKron(std::vector<int64_t>(kMaxDenseKronLength + 1, 1)).ok());
}

TEST(SparseInnerKronTest, Examples) {
  const std::vector<int64_t> x = {3, 4};
  auto empty = ValueOrDie(SparseFunctionVector::Create(4, {}));
  EXPECT_EQ(ValueOrDie(SparseInnerKron(empty, x)), 0);
  auto c = ValueOrDie(
      SparseFunctionVector::Create(4, {{ValueOrDie(KronFlat(0, 1, 2)), 5}}));
  EXPECT_EQ(ValueOrDie(SparseInnerKron(c, x)), 60);
}

TEST(SparseInnerKronTest, DimensionMismatch) {
  auto c = ValueOrDie(SparseFunctionVector::Create(9, {{0, 1}}));
  EXPECT_FALSE(SparseInnerKron(c, std::vector<int64_t>{1, 2}).ok());
}

TEST(SparseInnerKronTest, OverflowDetected) {
  const int64_t big = int64_t{1} << 62;
  auto c = ValueOrDie(SparseFunctionVector::Create(1, {{0, big}}));
  EXPECT_FALSE(SparseInnerKron(c, std::vector<int64_t>{big}).ok());
}

TEST(SparseInnerKronTest, MatchesDenseOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> value(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t length = 1 + rng() % 12;
    std::vector<int64_t> x(length);
    for (auto& v : x) v = value(rng);
    std::vector<SparseEntry> entries;
    for (uint64_t i = 0; i < length * length; ++i) {
      if (rng() % 3 == 0) {
        int64_t v = value(rng);
        if (v != 0) entries.push_back({i, v});
      }
    }
    auto c = ValueOrDie(SparseFunctionVector::Create(length * length, entries));
    const auto dense_c = ValueOrDie(c.ToDense());
    const auto square = ValueOrDie(DenseKron(x));
    EXPECT_EQ(ValueOrDie(SparseInnerKron(c, x)),
              ValueOrDie(DenseInnerProduct(dense_c, square)));
  }
}

TEST(SparseFunctionVectorTest, ValidatesEntries) {
  EXPECT_FALSE(SparseFunctionVector::Create(4, {{1, 1}, {1, 2}}).ok());
  EXPECT_FALSE(SparseFunctionVector::Create(4, {{2, 1}, {1, 2}}).ok());
  EXPECT_FALSE(SparseFunctionVector::Create(4, {{4, 1}}).ok());
  EXPECT_FALSE(SparseFunctionVector::Create(4, {{0, 0}}).ok());
  EXPECT_OK(SparseFunctionVector::Create(4, {{0, 1}, {3, -1}}));
}

}  // namespace
}  // namespace sfedv
