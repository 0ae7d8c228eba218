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

#include "sfedv/baseline.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "test_util.h"

namespace sfedv {
namespace {

using ::sfedv::testing::ValueOrDie;

double MaxRelDiff(std::span<const double> a, std::span<const double> b) {
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::fabs(v));
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
  }
  return worst;
}

struct Instance {
  RealMatrix x;
  std::vector<double> y;
  std::vector<double> w;
};

Instance RandomInstance(std::mt19937_64& rng, bool binary_labels) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const size_t rows = 1 + rng() % 16;
  const size_t cols = 1 + rng() % 8;
  Instance in{RealMatrix(rows, cols), {}, {}};
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) in.x(r, c) = unit(rng);
    in.y.push_back(binary_labels ? static_cast<double>(rng() % 2) : unit(rng));
  }
  for (size_t c = 0; c < cols; ++c) in.w.push_back(unit(rng));
  return in;
}

TEST(LinearGradientTest, HandComputed) {
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(1, 2, {5, 7}));
  EXPECT_EQ(ValueOrDie(CentralizedGradientLinear(
                x, std::vector<double>{4}, std::vector<double>{2, 3}, 0.0)),
            (std::vector<double>{270, 378}));
}

TEST(LinearGradientTest, ZeroAtLeastSquaresSolution) {
  const RealMatrix x =
      ValueOrDie(RealMatrix::FromRowMajor(3, 2, {1, 0, 0, 1, 1, 1}));
  const std::vector<double> w = {3, 4};
  const std::vector<double> y = {3, 4, 7};
  for (double g : ValueOrDie(CentralizedGradientLinear(x, y, w, 0.0))) {
    EXPECT_EQ(g, 0.0);
  }
}

TEST(LinearGradientTest, ShapeMismatch) {
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(1, 2, {5, 7}));
  EXPECT_FALSE(CentralizedGradientLinear(x, std::vector<double>{4, 1},
                                         std::vector<double>{2, 3}, 0.0)
                   .ok());
  EXPECT_FALSE(CentralizedGradientLinear(x, std::vector<double>{4},
                                         std::vector<double>{2}, 0.0)
                   .ok());
  EXPECT_FALSE(MseLoss(x, std::vector<double>{4}, std::vector<double>{2}).ok());
}

TEST(LinearGradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Instance in = RandomInstance(rng, false);
    const auto formula =
        ValueOrDie(CentralizedGradientLinear(in.x, in.y, in.w, 0.0));
    const auto fd = FiniteDifferenceGradient(
        [&](std::span<const double> w) {
          return ValueOrDie(MseLoss(in.x, in.y, w));
        },
        in.w);
    EXPECT_LT(MaxRelDiff(fd, formula), 1e-6);
  }
}

TEST(LogisticGradientTest, BalancedZero) {
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(2, 1, {1, -3}));
  for (double g : ValueOrDie(CentralizedGradientLogisticTaylor(
           x, std::vector<double>{0.5, 0.5}, std::vector<double>{0}, 0.0))) {
    EXPECT_EQ(g, 0.0);
  }
}

TEST(LogisticGradientTest, MatchesFiniteDifferencesOfTaylorLoss) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    Instance in = RandomInstance(rng, true);
    const auto formula =
        ValueOrDie(CentralizedGradientLogisticTaylor(in.x, in.y, in.w, 0.0));
    const auto fd = FiniteDifferenceGradient(
        [&](std::span<const double> w) {
          return ValueOrDie(TaylorLoss(in.x, in.y, w));
        },
        in.w);
    EXPECT_LT(MaxRelDiff(fd, formula), 1e-6);
  }
}

TEST(LogisticGradientTest, RegularizerTerm) {
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(1, 2, {1, 2}));
  const std::vector<double> y = {1};
  const std::vector<double> w = {0.5, -1};
  const auto plain = ValueOrDie(CentralizedGradientLogisticTaylor(x, y, w, 0.0));
  const auto reg = ValueOrDie(CentralizedGradientLogisticTaylor(x, y, w, 2.0));
  EXPECT_DOUBLE_EQ(reg[0], plain[0] + 1.0);
  EXPECT_DOUBLE_EQ(reg[1], plain[1] - 2.0);
}

TEST(TaylorLossTest, ZeroWeightsGiveLog2) {
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(2, 1, {1, -3}));
  EXPECT_DOUBLE_EQ(ValueOrDie(TaylorLoss(x, std::vector<double>{1, 0},
                                         std::vector<double>{0})),
                   std::numbers::ln2);
}

TEST(TaylorLossTest, TracksTrueLossNearZero) {
  // log(1 + e^{-z}) with z = (2y - 1) x w, close to the origin.
  const RealMatrix x = ValueOrDie(RealMatrix::FromRowMajor(1, 1, {1}));
  for (double w : {-0.1, 0.05, 0.1}) {
    for (double y : {0.0, 1.0}) {
      const double z = (2 * y - 1) * w;
      const double truth = std::log1p(std::exp(-z));
      EXPECT_NEAR(ValueOrDie(TaylorLoss(x, std::vector<double>{y},
                                        std::vector<double>{w})),
                  truth, 1e-4);
    }
  }
}

TEST(FiniteDifferenceTest, Quadratic) {
  const auto g = FiniteDifferenceGradient(
      [](std::span<const double> w) { return w[0] * w[0] + w[1] * w[1]; },
      std::vector<double>{1, 2}, 1e-4);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], 4.0, 1e-6);
}

TEST(FiniteDifferenceTest, SecondOrderInStep) {
  const LossFunction f = [](std::span<const double> w) {
    return std::sin(w[0]) + w[0] * w[0] * w[0];
  };
  const std::vector<double> w = {0.7};
  const double truth = std::cos(0.7) + 3 * 0.49;
  const double e1 = std::fabs(FiniteDifferenceGradient(f, w, 1e-2)[0] - truth);
  const double e2 = std::fabs(FiniteDifferenceGradient(f, w, 5e-3)[0] - truth);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

}  // namespace
}  // namespace sfedv
