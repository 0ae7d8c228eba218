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

#include "sfedv/sparse_function_vector.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace sfedv {

absl::StatusOr<SparseFunctionVector> SparseFunctionVector::Create(
    uint64_t dimension, std::vector<SparseEntry> entries) {
  for (size_t k = 0; k < entries.size(); ++k) {
    const SparseEntry& e = entries[k];
    if (e.index >= dimension) {
      return absl::InvalidArgumentError(absl::StrCat(
          "entry index ", e.index, " out of range for dimension ", dimension));
    }
    if (e.value == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("zero-valued entry at index ", e.index));
    }
    if (k > 0 && entries[k - 1].index >= e.index) {
      return absl::InvalidArgumentError(absl::StrCat(
          "entry indices not strictly increasing at position ", k));
    }
  }
  return SparseFunctionVector(dimension, std::move(entries));
}

absl::StatusOr<std::vector<int64_t>> SparseFunctionVector::ToDense() const {
  if (dimension_ > kMaxDenseDimension) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "dense expansion of dimension ", dimension_, " exceeds limit ",
        kMaxDenseDimension));
  }
  std::vector<int64_t> dense(dimension_, 0);
  for (const SparseEntry& e : entries_) dense[e.index] = e.value;
  return dense;
}

}  // namespace sfedv
