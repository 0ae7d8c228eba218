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

namespace sfedv {

absl::StatusOr<uint64_t> KronFlat(uint64_t row, uint64_t col,
                                  uint64_t length) {
  if (row >= length || col >= length) {
    return absl::OutOfRangeError(absl::StrCat("kron index (", row, ", ", col,
                                              ") out of range for L=", length));
  }
  return row * length + col;
}

absl::StatusOr<KronIndex> KronUnflat(uint64_t flat, uint64_t length) {
  if (length == 0 || flat / length >= length) {
    return absl::OutOfRangeError(
        absl::StrCat("flat index ", flat, " out of range for L=", length));
  }
  return KronIndex{flat / length, flat % length, flat};
}

absl::StatusOr<std::vector<WideInt>> DenseKron(std::span<const int64_t> x) {
  if (x.empty()) return absl::InvalidArgumentError("empty input vector");
  if (x.size() > kMaxDenseKronLength) {
    return absl::ResourceExhaustedError(
        absl::StrCat("dense kron of length ", x.size(), " exceeds limit ",
                     kMaxDenseKronLength));
  }
  std::vector<WideInt> out;
  out.reserve(x.size() * x.size());
  for (int64_t a : x) {
    for (int64_t b : x) out.push_back(static_cast<WideInt>(a) * b);
  }
  return out;
}

absl::StatusOr<WideInt> DenseInnerProduct(std::span<const int64_t> c,
                                          std::span<const WideInt> v) {
  if (c.size() != v.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dense inner product length mismatch: ", c.size(), " vs ", v.size()));
  }
  WideInt acc = 0;
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    WideInt term;
    if (!CheckedMul(c[k], v[k], &term) || !CheckedAdd(acc, term, &acc)) {
      return absl::OutOfRangeError("dense inner product overflow");
    }
  }
  return acc;
}

absl::StatusOr<WideInt> SparseInnerKron(const SparseFunctionVector& c,
                                        std::span<const int64_t> x) {
  const uint64_t length = x.size();
  if (c.dimension() != length * length) {
    return absl::InvalidArgumentError(
        absl::StrCat("function vector dimension ", c.dimension(),
                     " does not match input length ", length, " squared"));
  }
  WideInt acc = 0;
  for (const SparseEntry& e : c.entries()) {
    // |x[a] * x[b]| < 2^126 always holds for 64-bit entries.
    const WideInt pair = static_cast<WideInt>(x[e.index / length]) *
                         x[e.index % length];
    WideInt term;
    if (!CheckedMul(pair, e.value, &term) || !CheckedAdd(acc, term, &acc)) {
      return absl::OutOfRangeError(absl::StrCat(
          "accumulator overflow at flat index ", e.index));
    }
  }
  return acc;
}

}  // namespace sfedv
