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

#ifndef SFEDV_WIDE_INT_H_
#define SFEDV_WIDE_INT_H_

#include <string>

namespace sfedv {

// Signed 128-bit accumulator used for every exact inner product. Quantized
// entries are at most 63 bits wide, so a single product of two entries always
// fits; sums and triple products are overflow-checked.
using WideInt = __int128;

inline constexpr WideInt kWideIntMax =
    static_cast<WideInt>((static_cast<unsigned __int128>(1) << 127) - 1);

std::string WideIntToString(WideInt value);

// Overflow-checked arithmetic. Return false on overflow and leave *out
// unspecified.
inline bool CheckedAdd(WideInt a, WideInt b, WideInt* out) {
  return !__builtin_add_overflow(a, b, out);
}
inline bool CheckedMul(WideInt a, WideInt b, WideInt* out) {
  return !__builtin_mul_overflow(a, b, out);
}

inline WideInt AbsWide(WideInt v) { return v < 0 ? -v : v; }

}  // namespace sfedv

#endif  // SFEDV_WIDE_INT_H_
