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

#ifndef SFEDV_SPARSE_FUNCTION_VECTOR_H_
#define SFEDV_SPARSE_FUNCTION_VECTOR_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"

namespace sfedv {

struct SparseEntry {
  uint64_t index;
  int64_t value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Coefficient vector c over the Kronecker square of the concatenated input,
// stored as its nonzero entries. Entries are sorted by strictly increasing
// index and never hold a zero value, so two vectors are equal exactly when
// their dimensions and entry lists are equal.
class SparseFunctionVector {
 public:
  // Validates ordering, range and nonzero-ness of `entries`.
  static absl::StatusOr<SparseFunctionVector> Create(
      uint64_t dimension, std::vector<SparseEntry> entries);

  uint64_t dimension() const { return dimension_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  size_t nnz() const { return entries_.size(); }

  // Dense expansion for test oracles. Refuses dimensions above
  // kMaxDenseDimension.
  absl::StatusOr<std::vector<int64_t>> ToDense() const;

  static constexpr uint64_t kMaxDenseDimension = uint64_t{1} << 20;

  friend bool operator==(const SparseFunctionVector&,
                         const SparseFunctionVector&) = default;

 private:
  SparseFunctionVector(uint64_t dimension, std::vector<SparseEntry> entries)
      : dimension_(dimension), entries_(std::move(entries)) {}

  uint64_t dimension_;
  std::vector<SparseEntry> entries_;
};

}  // namespace sfedv

#endif  // SFEDV_SPARSE_FUNCTION_VECTOR_H_
