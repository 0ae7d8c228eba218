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

#include "sfedv/fixed_point.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace sfedv {
namespace {

constexpr double kQuantizeLimit = 4611686018427387904.0;  // 2^62

WideInt SaturatingMul(WideInt a, WideInt b) {
  WideInt out;
  if (!CheckedMul(a, b, &out)) return kWideIntMax;
  return out;
}

WideInt CeilScaled(double v, int bits) {
  const double scaled = std::ceil(std::ldexp(std::fabs(v), bits));
  if (!(scaled < 1.0e38)) return kWideIntMax;
  return static_cast<WideInt>(scaled);
}

}  // namespace

absl::Status FixedPointConfig::Validate() const {
  if (data_bits < 0 || data_bits > kMaxBits || weight_bits < 0 ||
      weight_bits > kMaxBits) {
    return absl::InvalidArgumentError(
        absl::StrCat("fixed-point bits must lie in [0, ", kMaxBits,
                     "], got data_bits=", data_bits,
                     " weight_bits=", weight_bits));
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> Quantize(double v, int bits, RoundingPolicy policy) {
  if (bits < 0 || bits > 62) {
    return absl::InvalidArgumentError(absl::StrCat("invalid bit count ", bits));
  }
  if (!std::isfinite(v)) {
    return absl::InvalidArgumentError("cannot quantize a non-finite value");
  }
  const double scaled = std::ldexp(v, bits);
  if (std::fabs(scaled) >= kQuantizeLimit) {
    return absl::OutOfRangeError(absl::StrCat(
        "value ", v, " at ", bits, " fractional bits exceeds 2^62"));
  }
  // std::round rounds half away from zero.
  const double rounded = std::round(scaled);
  if (policy == RoundingPolicy::kExact && rounded != scaled) {
    return absl::InvalidArgumentError(absl::StrCat(
        "value ", v, " is not representable with ", bits,
        " fractional bits"));
  }
  return static_cast<int64_t>(rounded);
}

absl::StatusOr<std::vector<int64_t>> QuantizeVector(std::span<const double> v,
                                                    int bits,
                                                    RoundingPolicy policy) {
  std::vector<int64_t> out;
  out.reserve(v.size());
  for (double x : v) {
    auto q = Quantize(x, bits, policy);
    if (!q.ok()) return q.status();
    out.push_back(*q);
  }
  return out;
}

double SnapToGrid(double v, int bits) {
  return std::ldexp(std::round(std::ldexp(v, bits)), -bits);
}

double Dequantize(const ScaledResult& r) {
  return std::ldexp(static_cast<double>(r.raw), -r.scale_exp);
}

WideInt OverflowBound(uint64_t batch_size, uint64_t total_features,
                      int data_bits, int weight_bits, double max_abs_x,
                      double max_abs_w) {
  const WideInt terms =
      static_cast<WideInt>(batch_size) * (static_cast<WideInt>(total_features) + 1);
  // The label block's coefficient is the unit 2^qw.
  const WideInt w = CeilScaled(std::max(std::fabs(max_abs_w), 1.0), weight_bits);
  const WideInt x = CeilScaled(max_abs_x, data_bits);
  return SaturatingMul(SaturatingMul(terms, w), SaturatingMul(x, x));
}

double InnerProductErrorBound(uint64_t batch_size, uint64_t total_features,
                              int data_bits, int weight_bits, double max_abs_x,
                              double max_abs_w) {
  const double terms = static_cast<double>(batch_size) *
                       (static_cast<double>(total_features) + 1.0);
  const double dx = std::ldexp(0.5, -data_bits);
  const double dw = std::ldexp(0.5, -weight_bits);
  const double coef = std::max(std::fabs(max_abs_w), 1.0);
  const double x = std::fabs(max_abs_x);
  // |c'a'b' - cab| <= |dc| (|x| + dx)^2 + |c| (2 |x| dx + dx^2).
  const double per_term =
      dw * (x + dx) * (x + dx) + coef * (2.0 * x * dx + dx * dx);
  const double magnitude = terms * (coef + dw) * (x + dx) * (x + dx);
  return terms * per_term + std::ldexp(magnitude, -50);
}

}  // namespace sfedv
