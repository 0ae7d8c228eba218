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

#ifndef SFEDV_TENSOR_H_
#define SFEDV_TENSOR_H_

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "sfedv/sparse_function_vector.h"
#include "sfedv/wide_int.h"

namespace sfedv {

// Dense row-major matrix. Rows index samples, columns index features.
template <typename T>
class Matrix {
 public:
  Matrix() = default;

  // Requires rows >= 1 and cols >= 1.
  Matrix(size_t rows, size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    assert(rows >= 1 && cols >= 1);
  }

  static absl::StatusOr<Matrix> FromRowMajor(size_t rows, size_t cols,
                                             std::vector<T> data) {
    if (rows == 0 || cols == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("matrix shape must be positive, got ", rows, "x", cols));
    }
    if (data.size() != rows * cols) {
      return absl::InvalidArgumentError(
          absl::StrCat("matrix data length ", data.size(), " does not match ",
                       rows, "x", cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  std::span<const T> data() const { return data_; }

  T& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> Column(size_t c) const {
    std::vector<T> out(rows_);
    for (size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  // Rows in the given order; indices may repeat.
  Matrix SelectRows(std::span<const size_t> row_indices) const {
    Matrix out(row_indices.size(), cols_);
    for (size_t i = 0; i < row_indices.size(); ++i) {
      for (size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(row_indices[i], c);
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using IntMatrix = Matrix<int64_t>;
using IntVector = std::vector<int64_t>;

// Stacks the columns of `m`: out[f * rows + s] = m(s, f).
template <typename T>
std::vector<T> VecColumns(const Matrix<T>& m) {
  std::vector<T> out;
  out.reserve(m.rows() * m.cols());
  for (size_t f = 0; f < m.cols(); ++f) {
    for (size_t s = 0; s < m.rows(); ++s) out.push_back(m(s, f));
  }
  return out;
}

// Inverse of VecColumns.
template <typename T>
absl::StatusOr<Matrix<T>> UnvecColumns(std::span<const T> v, size_t rows,
                                       size_t cols) {
  if (rows == 0 || cols == 0 || v.size() != rows * cols) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot reshape length ", v.size(), " into ", rows, "x", cols));
  }
  Matrix<T> m(rows, cols);
  for (size_t f = 0; f < cols; ++f) {
    for (size_t s = 0; s < rows; ++s) m(s, f) = v[f * rows + s];
  }
  return m;
}

// Position (row, col) of an entry of x (x) x for |x| = L, flattened as
// row * L + col.
struct KronIndex {
  uint64_t row;
  uint64_t col;
  uint64_t flat;

  friend bool operator==(const KronIndex&, const KronIndex&) = default;
};

absl::StatusOr<uint64_t> KronFlat(uint64_t row, uint64_t col, uint64_t length);
absl::StatusOr<KronIndex> KronUnflat(uint64_t flat, uint64_t length);

// Largest input length DenseKron accepts. The dense square only exists as a
// test oracle.
inline constexpr size_t kMaxDenseKronLength = 256;

// out[a * L + b] = x[a] * x[b].
absl::StatusOr<std::vector<WideInt>> DenseKron(std::span<const int64_t> x);

// <c, v> for a dense coefficient vector, overflow-checked.
absl::StatusOr<WideInt> DenseInnerProduct(std::span<const int64_t> c,
                                          std::span<const WideInt> v);

// <c, x (x) x> computed from the nonzeros of c without materializing the
// Kronecker square. Fails on dimension mismatch or accumulator overflow.
absl::StatusOr<WideInt> SparseInnerKron(const SparseFunctionVector& c,
                                        std::span<const int64_t> x);

}  // namespace sfedv

#endif  // SFEDV_TENSOR_H_
