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

#ifndef SFEDV_FE_IDEAL_H_
#define SFEDV_FE_IDEAL_H_

// Ideal functionality for secret-key quadratic multi-input functional
// encryption with tags. Nothing here is cryptographic: ciphertexts hold their
// plaintext, but the only way to observe it is Decrypt, which releases exactly
// <c, x (x) x> for the concatenation x of one ciphertext per slot, and only
// when every ciphertext and the key come from the same instance and tag.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sfedv/sparse_function_vector.h"
#include "sfedv/wide_int.h"

namespace sfedv::fe {

enum class FeError {
  kInstanceMismatch,
  kTagMismatch,
  kMissingSlot,
  kDuplicateSlot,
  kOverflow,
};

absl::string_view FeErrorName(FeError error);

// Classifies a status returned by this module. Statuses that did not
// originate from a gated FE check return nullopt.
std::optional<FeError> GetFeError(const absl::Status& status);

struct InstanceId {
  uint64_t value = 0;
  auto operator<=>(const InstanceId&) const = default;
};

struct Tag {
  uint64_t value = 0;
  auto operator<=>(const Tag&) const = default;
};

struct SetupOptions {
  // Rejects a second encryption for the same (slot, tag) within one instance.
  // Off by default: correctness does not need it, but the admissibility rule
  // of the tagged security game does.
  bool single_encryption_per_tag = false;
};

struct AuditCounters {
  uint64_t encryptions = 0;
  uint64_t keygens = 0;
  // Successful decryptions only.
  uint64_t decryptions = 0;
  std::vector<uint64_t> encryptions_per_slot;
};

namespace internal {
struct InstanceState;
// Grants the functionality's free functions access to sealed state.
struct Access;
}  // namespace internal

// Master-key holder. Only the party running Setup should own one.
class FeInstance {
 public:
  InstanceId id() const;
  size_t num_slots() const;
  std::span<const size_t> slot_lengths() const;
  // Total input length L; keys must have dimension L^2.
  size_t input_length() const;

 private:
  friend struct internal::Access;
  explicit FeInstance(std::shared_ptr<internal::InstanceState> state)
      : state_(std::move(state)) {}

  std::shared_ptr<internal::InstanceState> state_;
};

class EncryptionKey {
 public:
  InstanceId instance_id() const;
  size_t slot() const { return slot_; }
  size_t slot_length() const;

 private:
  friend struct internal::Access;
  EncryptionKey(std::shared_ptr<internal::InstanceState> state, size_t slot)
      : state_(std::move(state)), slot_(slot) {}

  std::shared_ptr<internal::InstanceState> state_;
  size_t slot_;
};

// Public header (instance, slot, tag, length) plus a sealed payload. The
// payload has no accessor and never appears in SerializeHeader().
class Ciphertext {
 public:
  InstanceId instance_id() const { return instance_id_; }
  size_t slot() const { return slot_; }
  Tag tag() const { return tag_; }
  size_t length() const { return payload_.size(); }

  // Header-only debug serialization.
  std::string SerializeHeader() const;

 private:
  friend struct internal::Access;
  Ciphertext(InstanceId id, size_t slot, Tag tag, std::vector<int64_t> payload)
      : instance_id_(id), slot_(slot), tag_(tag), payload_(std::move(payload)) {}

  InstanceId instance_id_;
  size_t slot_;
  Tag tag_;
  std::vector<int64_t> payload_;
};

class SecretKey {
 public:
  InstanceId instance_id() const;
  Tag tag() const { return tag_; }
  const SparseFunctionVector& function_vector() const { return function_; }

 private:
  friend struct internal::Access;
  SecretKey(std::shared_ptr<internal::InstanceState> state, Tag tag,
            SparseFunctionVector function)
      : state_(std::move(state)), tag_(tag), function_(std::move(function)) {}

  std::shared_ptr<internal::InstanceState> state_;
  Tag tag_;
  SparseFunctionVector function_;
};

struct SetupResult {
  FeInstance instance;
  // encryption_keys[k] encrypts slot k.
  std::vector<EncryptionKey> encryption_keys;
};

// Fresh instance with `num_slots` slots of the given lengths. Instance ids are
// unique across the process.
absl::StatusOr<SetupResult> Setup(size_t num_slots,
                                  std::vector<size_t> slot_lengths,
                                  SetupOptions options = {});

absl::StatusOr<Ciphertext> Encrypt(const EncryptionKey& key, Tag tag,
                                   std::span<const int64_t> plaintext);

absl::StatusOr<SecretKey> KeyGen(const FeInstance& instance, Tag tag,
                                 SparseFunctionVector function);

// Returns <c, x (x) x>. Checks, in order: instance match, tag match, no
// duplicate slot, every slot present, accumulator overflow. Each failure is a
// typed error; there is no partial result.
absl::StatusOr<WideInt> Decrypt(std::span<const Ciphertext> ciphertexts,
                                const SecretKey& key);

AuditCounters GetAuditCounters(const FeInstance& instance);

}  // namespace sfedv::fe

#endif  // SFEDV_FE_IDEAL_H_
