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

#include "sfedv/function_vector.h"

#include <random>

#include "gtest/gtest.h"
#include "sfedv/tensor.h"
#include "test_util.h"

namespace sfedv {
namespace {

using ::sfedv::testing::ValueOrDie;

TEST(LayoutTest, Examples) {
  Layout a = ValueOrDie(BuildLayout(1, 1, {1}));
  EXPECT_EQ(a.offsets, (std::vector<size_t>{0}));
  EXPECT_EQ(a.label_offset, 1u);
  EXPECT_EQ(a.length, 2u);

  Layout b = ValueOrDie(BuildLayout(2, 2, {1, 2}));
  EXPECT_EQ(b.offsets, (std::vector<size_t>{0, 2}));
  EXPECT_EQ(b.label_offset, 6u);
  EXPECT_EQ(b.length, 8u);
  EXPECT_EQ(b.dimension(), 64u);
  EXPECT_EQ(b.num_slots(), 3u);
  EXPECT_EQ(b.SlotLengths(), (std::vector<size_t>{2, 4, 2}));

  EXPECT_EQ(ValueOrDie(BuildLayout(3, 4, {2, 2, 2})).length, 28u);
}

TEST(LayoutTest, RejectsZeroCounts) {
  EXPECT_FALSE(BuildLayout(0, 1, {}).ok());
  EXPECT_FALSE(BuildLayout(1, 0, {1}).ok());
  EXPECT_FALSE(BuildLayout(2, 1, {1, 0}).ok());
  EXPECT_FALSE(BuildLayout(2, 1, {1}).ok());
}

TEST(SubcGenTest, ZeroWeightsKeepOnlyLabelTerm) {
  Layout layout = ValueOrDie(BuildLayout(1, 1, {1}));
  auto entries = ValueOrDie(SubcGen({{0}}, 1, layout));
  EXPECT_EQ(entries, (std::vector<SparseEntry>{{1, 1}}));
}

TEST(SubcGenTest, TwoClients) {
  Layout layout = ValueOrDie(BuildLayout(2, 1, {1, 1}));
  auto entries = ValueOrDie(SubcGen({{2}, {3}}, 1, layout));
  EXPECT_EQ(entries, (std::vector<SparseEntry>{{0, -2}, {1, -3}, {2, 1}}));
}

TEST(CGenTest, HandExpandedInstance) {
  Layout layout = ValueOrDie(BuildLayout(2, 1, {1, 1}));
  const QuantizedWeights w = {{2}, {3}};
  const std::vector<int64_t> x = {5, 7, 4};

  auto c0 = ValueOrDie(CGen(w, 1, layout, 0, 0));
  EXPECT_EQ(c0.dimension(), 9u);
  EXPECT_EQ(c0.entries(), (std::vector<SparseEntry>{{0, -2}, {1, -3}, {2, 1}}));
  EXPECT_EQ(ValueOrDie(SparseInnerKron(c0, x)), -135);

  auto c1 = ValueOrDie(CGen(w, 1, layout, 1, 0));
  EXPECT_EQ(ValueOrDie(SparseInnerKron(c1, x)), -189);

  EXPECT_FALSE(CGen(w, 1, layout, 2, 0).ok());
  EXPECT_FALSE(CGen(w, 1, layout, 0, 1).ok());
}

TEST(CGenTest, RejectsWeightShapeMismatch) {
  Layout layout = ValueOrDie(BuildLayout(2, 1, {1, 2}));
  EXPECT_FALSE(CGen({{1}, {1}}, 1, layout, 0, 0).ok());
}

// Sparsity, block placement and ordering over the full instance grid.
TEST(CGenTest, StructureOverGrid) {
  std::mt19937_64 rng(17);
  for (size_t n = 1; n <= 3; ++n) {
    for (size_t s = 1; s <= 8; ++s) {
      std::vector<size_t> counts;
      for (size_t i = 0; i < n; ++i) counts.push_back(1 + rng() % 4);
      Layout layout = ValueOrDie(BuildLayout(n, s, counts));
      QuantizedWeights w;
      for (size_t i = 0; i < n; ++i) {
        std::vector<int64_t> wi;
        for (size_t f = 0; f < counts[i]; ++f) {
          int64_t v = static_cast<int64_t>(rng() % 9) - 4;
          wi.push_back(v == 0 ? 1 : v);
        }
        w.push_back(wi);
      }
      auto all = ValueOrDie(CGenAll(w, 1, layout));
      ASSERT_EQ(all.size(), layout.total_features);
      for (size_t i = 0; i < n; ++i) {
        for (size_t p = 0; p < counts[i]; ++p) {
          const size_t g = layout.GlobalFeatureIndex(i, p);
          size_t expected_g = p;
          for (size_t j = 0; j < i; ++j) expected_g += counts[j];
          EXPECT_EQ(g, expected_g);
          const SparseFunctionVector& c = all[g];
          EXPECT_EQ(c, ValueOrDie(CGen(w, 1, layout, i, p)));
          EXPECT_EQ(c.nnz(), s * (layout.total_features + 1));
          const uint64_t lo = layout.offsets[i] + p * s;
          for (const SparseEntry& e : c.entries()) {
            const uint64_t row = e.index / layout.length;
            EXPECT_GE(row, lo);
            EXPECT_LT(row, lo + s);
          }
        }
      }
    }
  }
}

TEST(LogisticAdjustTest, Examples) {
  LogisticInputs out =
      LogisticAdjust(WeightVector({{4.0, 8.0}}), std::vector<double>{1, 0});
  EXPECT_EQ(out.weights, WeightVector({{1.0, 2.0}}));
  EXPECT_EQ(out.labels, (std::vector<double>{0.5, -0.5}));

  LogisticInputs zero =
      LogisticAdjust(WeightVector(std::vector<std::vector<double>>{{0.0}, {0.0}}), std::vector<double>{});
  EXPECT_EQ(zero.weights, WeightVector(std::vector<std::vector<double>>{{0.0}, {0.0}}));
}

TEST(WeightVectorTest, FlatRoundTrip) {
  const std::vector<size_t> counts = {1, 3};
  const std::vector<double> flat = {1, 2, 3, 4};
  WeightVector w = ValueOrDie(WeightVector::FromFlat(flat, counts));
  EXPECT_EQ(w.segment(1), (std::vector<double>{2, 3, 4}));
  EXPECT_EQ(w.Flatten(), flat);
  EXPECT_TRUE(w.Matches(counts));
  EXPECT_FALSE(WeightVector::FromFlat(flat, std::vector<size_t>{2}).ok());
  EXPECT_EQ(WeightVector::Zeros(counts).size(), 4u);
}

TEST(QuantizeWeightsTest, ScalesEachSegment) {
  auto q = ValueOrDie(QuantizeWeights(WeightVector({{0.5}, {-1.25, 2.0}}), 2));
  EXPECT_EQ(q, (QuantizedWeights{{2}, {-5, 8}}));
  EXPECT_FALSE(QuantizeWeights(WeightVector(std::vector<std::vector<double>>{{0.3}}), 2, RoundingPolicy::kExact)
                   .ok());
}

}  // namespace
}  // namespace sfedv
