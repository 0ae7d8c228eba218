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

#ifndef SFEDV_TESTS_TEST_UTIL_H_
#define SFEDV_TESTS_TEST_UTIL_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gtest/gtest.h"

namespace sfedv::testing {

inline const absl::Status& ToStatus(const absl::Status& s) { return s; }
template <typename T>
const absl::Status& ToStatus(const absl::StatusOr<T>& s) {
  return s.status();
}

// Unwraps a StatusOr, failing the current test on error.
template <typename T>
T ValueOrDie(absl::StatusOr<T> s) {
  if (!s.ok()) {
    ADD_FAILURE() << s.status();
    std::abort();
  }
  return *std::move(s);
}

}  // namespace sfedv::testing

#define EXPECT_OK(expr) EXPECT_TRUE(::sfedv::testing::ToStatus(expr).ok()) \
    << ::sfedv::testing::ToStatus(expr)
#define ASSERT_OK(expr) ASSERT_TRUE(::sfedv::testing::ToStatus(expr).ok()) \
    << ::sfedv::testing::ToStatus(expr)

#endif  // SFEDV_TESTS_TEST_UTIL_H_
