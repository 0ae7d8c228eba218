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

#ifndef SFEDV_FUNCTION_VECTOR_H_
#define SFEDV_FUNCTION_VECTOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "sfedv/fixed_point.h"
#include "sfedv/sparse_function_vector.h"

namespace sfedv {

// Index geometry of x = [x_0 || ... || x_{N-1} || y], where x_i is the
// column-stacked S x F_i batch of client i and y the S labels.
struct Layout {
  size_t num_clients = 0;
  size_t batch_size = 0;
  std::vector<size_t> feature_counts;
  size_t total_features = 0;
  // offsets[i] = S * sum_{j<i} F_j.
  std::vector<size_t> offsets;
  size_t label_offset = 0;
  // L = S * (F + 1).
  size_t length = 0;

  uint64_t dimension() const {
    return static_cast<uint64_t>(length) * length;
  }
  // Position of slice (client, feature) in the concatenated gradient.
  size_t GlobalFeatureIndex(size_t client, size_t feature) const;
  // N + 1 slots: one per client, then the label slot.
  size_t num_slots() const { return num_clients + 1; }
  std::vector<size_t> SlotLengths() const;
};

absl::StatusOr<Layout> BuildLayout(size_t num_clients, size_t batch_size,
                                   std::vector<size_t> feature_counts);

// Model weights split into per-client segments w_i of length F_i.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<std::vector<double>> segments)
      : segments_(std::move(segments)) {}

  static WeightVector Zeros(std::span<const size_t> feature_counts);
  static absl::StatusOr<WeightVector> FromFlat(
      std::span<const double> flat, std::span<const size_t> feature_counts);

  size_t num_segments() const { return segments_.size(); }
  const std::vector<double>& segment(size_t i) const { return segments_[i]; }
  const std::vector<std::vector<double>>& segments() const { return segments_; }
  size_t size() const;
  std::vector<double> Flatten() const;
  bool Matches(std::span<const size_t> feature_counts) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<std::vector<double>> segments_;
};

using QuantizedWeights = std::vector<std::vector<int64_t>>;

absl::StatusOr<QuantizedWeights> QuantizeWeights(
    const WeightVector& w, int weight_bits,
    RoundingPolicy policy = RoundingPolicy::kNearest);

// Nonzero entries of the sub-vector d paired with the block D_i^p (x) x,
// indexed relative to the start of that block (length S * L). For each sample
// s it emits -w[j][f] at s*L + off_j + f*S + s and `unit` at
// s*L + label_offset + s. Entries come out sorted; zero weights are dropped.
absl::StatusOr<std::vector<SparseEntry>> SubcGen(const QuantizedWeights& w,
                                                 int64_t unit,
                                                 const Layout& layout);

// Function vector c_{i,p} with <c_{i,p}, x (x) x> = ((y - sum_j X_j w_j)^T
// X_i)[p]. Only the rows of the D_i^p block are populated.
absl::StatusOr<SparseFunctionVector> CGen(const QuantizedWeights& w,
                                          int64_t unit, const Layout& layout,
                                          size_t client, size_t feature);

// All F function vectors, ordered by (client, feature) ascending, which is the
// gradient concatenation order.
absl::StatusOr<std::vector<SparseFunctionVector>> CGenAll(
    const QuantizedWeights& w, int64_t unit, const Layout& layout);

struct LogisticInputs {
  WeightVector weights;
  std::vector<double> labels;
};

// (w / 4, y - 1/2): the inputs that turn the linear pipeline into the
// degree-2 Taylor logistic gradient.
LogisticInputs LogisticAdjust(const WeightVector& w,
                              std::span<const double> labels);

}  // namespace sfedv

#endif  // SFEDV_FUNCTION_VECTOR_H_
