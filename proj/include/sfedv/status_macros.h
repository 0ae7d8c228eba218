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

#ifndef SFEDV_STATUS_MACROS_H_
#define SFEDV_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define SFEDV_CONCAT_INNER_(a, b) a##b
#define SFEDV_CONCAT_(a, b) SFEDV_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                 \
  do {                                        \
    ::absl::Status _sfedv_status = (expr);    \
    if (!_sfedv_status.ok()) return _sfedv_status; \
  } while (0)

#define SFEDV_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                 \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

// ASSIGN_OR_RETURN(auto x, MaybeX()) binds x on success and returns the
// error status otherwise.
#define ASSIGN_OR_RETURN(lhs, rexpr) \
  SFEDV_ASSIGN_OR_RETURN_IMPL_(SFEDV_CONCAT_(_sfedv_or_, __LINE__), lhs, rexpr)

#endif  // SFEDV_STATUS_MACROS_H_
