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

#ifndef SFEDV_FIXED_POINT_H_
#define SFEDV_FIXED_POINT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sfedv/wide_int.h"

namespace sfedv {

// Fractional bits used to encode real values as integers before encryption.
// A decrypted gradient slice carries scale 2^(weight_bits + 2 * data_bits).
struct FixedPointConfig {
  static constexpr int kMaxBits = 24;

  int data_bits = 12;
  int weight_bits = 12;

  absl::Status Validate() const;
  int result_scale_exp() const { return weight_bits + 2 * data_bits; }
};

enum class RoundingPolicy {
  // Round half away from zero.
  kNearest,
  // Fail unless v * 2^bits is already an integer.
  kExact,
};

// round(v * 2^bits), half away from zero. Fails when |v| * 2^bits >= 2^62 or
// v is not finite.
absl::StatusOr<int64_t> Quantize(double v, int bits,
                                 RoundingPolicy policy = RoundingPolicy::kNearest);

absl::StatusOr<std::vector<int64_t>> QuantizeVector(
    std::span<const double> v, int bits,
    RoundingPolicy policy = RoundingPolicy::kNearest);

// Nearest point of the 2^-bits grid, half away from zero. Unlike Quantize
// this stays in the real domain and never fails for finite input.
double SnapToGrid(double v, int bits);

struct ScaledResult {
  WideInt raw = 0;
  int scale_exp = 0;
};

// raw / 2^scale_exp.
double Dequantize(const ScaledResult& r);

// Worst-case magnitude of one decrypted gradient slice:
// S * (F + 1) * ceil(max_abs_w * 2^qw) * ceil(max_abs_x * 2^qx)^2.
// Saturates at kWideIntMax instead of overflowing.
WideInt OverflowBound(uint64_t batch_size, uint64_t total_features,
                      int data_bits, int weight_bits, double max_abs_x,
                      double max_abs_w);

// Callers must keep OverflowBound(...) strictly below this.
inline constexpr WideInt kAccumulatorLimit = static_cast<WideInt>(1) << 126;

// Bound on |dequantized slice - real-arithmetic slice| for one decryption of
// S * (F + 1) products coef * x_a * x_b when every x is rounded to data_bits
// and every weight coefficient to weight_bits. The label coefficient is 1, so
// the coefficient magnitude used is max(max_abs_w, 1). A relative 2^-50 term
// covers double rounding in the final conversion and in the plaintext
// reference.
double InnerProductErrorBound(uint64_t batch_size, uint64_t total_features,
                              int data_bits, int weight_bits, double max_abs_x,
                              double max_abs_w);

}  // namespace sfedv

#endif  // SFEDV_FIXED_POINT_H_
