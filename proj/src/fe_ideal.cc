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

#include "absl/strings/string_view.h"
#include "sfedv/fe_ideal.h"

#include <atomic>
#include <mutex>
#include <numeric>
#include <set>
#include <utility>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "sfedv/tensor.h"

namespace sfedv::fe {
namespace internal {

struct InstanceState {
  InstanceState(InstanceId id, std::vector<size_t> lengths, SetupOptions opts)
      : id(id),
        slot_lengths(std::move(lengths)),
        input_length(std::accumulate(slot_lengths.begin(), slot_lengths.end(),
                                     size_t{0})),
        options(opts),
        encryptions_per_slot(slot_lengths.size()) {}

  const InstanceId id;
  const std::vector<size_t> slot_lengths;
  const size_t input_length;
  const SetupOptions options;

  std::atomic<uint64_t> keygens{0};
  std::atomic<uint64_t> decryptions{0};
  std::vector<std::atomic<uint64_t>> encryptions_per_slot;

  std::mutex mu;
  std::set<std::pair<size_t, uint64_t>> used_slot_tags;  // Guarded by mu.
};

struct Access {
  static FeInstance MakeInstance(std::shared_ptr<InstanceState> s) {
    return FeInstance(std::move(s));
  }
  static EncryptionKey MakeKey(std::shared_ptr<InstanceState> s, size_t slot) {
    return EncryptionKey(std::move(s), slot);
  }
  static Ciphertext MakeCiphertext(InstanceId id, size_t slot, Tag tag,
                                   std::vector<int64_t> payload) {
    return Ciphertext(id, slot, tag, std::move(payload));
  }
  static SecretKey MakeSecretKey(std::shared_ptr<InstanceState> s, Tag tag,
                                 SparseFunctionVector c) {
    return SecretKey(std::move(s), tag, std::move(c));
  }
  static std::shared_ptr<InstanceState> StatePtr(const FeInstance& i) {
    return i.state_;
  }
  static InstanceState& State(const FeInstance& i) { return *i.state_; }
  static InstanceState& State(const EncryptionKey& k) { return *k.state_; }
  static InstanceState& State(const SecretKey& k) { return *k.state_; }
  static const std::vector<int64_t>& Payload(const Ciphertext& ct) {
    return ct.payload_;
  }
};

}  // namespace internal

namespace {

using internal::Access;

constexpr absl::string_view kFeErrorPayloadUrl = "type.sfedv/fe.FeError";

absl::Status MakeFeError(FeError error, absl::string_view message) {
  absl::Status status;
  switch (error) {
    case FeError::kInstanceMismatch:
      status = absl::FailedPreconditionError(message);
      break;
    case FeError::kTagMismatch:
      status = absl::PermissionDeniedError(message);
      break;
    case FeError::kMissingSlot:
    case FeError::kDuplicateSlot:
      status = absl::InvalidArgumentError(message);
      break;
    case FeError::kOverflow:
      status = absl::OutOfRangeError(message);
      break;
  }
  status.SetPayload(kFeErrorPayloadUrl, absl::Cord(FeErrorName(error)));
  return status;
}

std::atomic<uint64_t> next_instance_id{1};

}  // namespace

absl::string_view FeErrorName(FeError error) {
  switch (error) {
    case FeError::kInstanceMismatch:
      return "InstanceMismatch";
    case FeError::kTagMismatch:
      return "TagMismatch";
    case FeError::kMissingSlot:
      return "MissingSlot";
    case FeError::kDuplicateSlot:
      return "DuplicateSlot";
    case FeError::kOverflow:
      return "Overflow";
  }
  return "Unknown";
}

std::optional<FeError> GetFeError(const absl::Status& status) {
  auto payload = status.GetPayload(kFeErrorPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (FeError e : {FeError::kInstanceMismatch, FeError::kTagMismatch,
                    FeError::kMissingSlot, FeError::kDuplicateSlot,
                    FeError::kOverflow}) {
    if (FeErrorName(e) == name) return e;
  }
  return std::nullopt;
}

InstanceId FeInstance::id() const { return state_->id; }
size_t FeInstance::num_slots() const { return state_->slot_lengths.size(); }
std::span<const size_t> FeInstance::slot_lengths() const {
  return state_->slot_lengths;
}
size_t FeInstance::input_length() const { return state_->input_length; }

InstanceId EncryptionKey::instance_id() const { return state_->id; }
size_t EncryptionKey::slot_length() const {
  return state_->slot_lengths[slot_];
}

InstanceId SecretKey::instance_id() const { return state_->id; }

std::string Ciphertext::SerializeHeader() const {
  return absl::StrCat("{\"instance\":", instance_id_.value,
                      ",\"slot\":", slot_, ",\"tag\":", tag_.value,
                      ",\"length\":", payload_.size(), "}");
}

absl::StatusOr<SetupResult> Setup(size_t num_slots,
                                  std::vector<size_t> slot_lengths,
                                  SetupOptions options) {
  if (num_slots < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 slots, got ", num_slots));
  }
  if (slot_lengths.size() != num_slots) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", slot_lengths.size(), " slot lengths for ",
                     num_slots, " slots"));
  }
  for (size_t k = 0; k < num_slots; ++k) {
    if (slot_lengths[k] == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("slot ", k, " has zero length"));
    }
  }
  auto state = std::make_shared<internal::InstanceState>(
      InstanceId{next_instance_id.fetch_add(1)}, std::move(slot_lengths),
      options);
  SetupResult result{Access::MakeInstance(state), {}};
  result.encryption_keys.reserve(num_slots);
  for (size_t k = 0; k < num_slots; ++k) {
    result.encryption_keys.push_back(Access::MakeKey(state, k));
  }
  return result;
}

absl::StatusOr<Ciphertext> Encrypt(const EncryptionKey& key, Tag tag,
                                   std::span<const int64_t> plaintext) {
  internal::InstanceState& state = Access::State(key);
  const size_t expected = state.slot_lengths[key.slot()];
  if (plaintext.size() != expected) {
    return absl::InvalidArgumentError(
        absl::StrCat("slot ", key.slot(), " expects length ", expected,
                     ", got ", plaintext.size()));
  }
  if (state.options.single_encryption_per_tag) {
    std::lock_guard<std::mutex> lock(state.mu);
    if (!state.used_slot_tags.emplace(key.slot(), tag.value).second) {
      return MakeFeError(
          FeError::kDuplicateSlot,
          absl::StrCat("slot ", key.slot(), " already encrypted under tag ",
                       tag.value));
    }
  }
  state.encryptions_per_slot[key.slot()].fetch_add(1);
  return Access::MakeCiphertext(
      state.id, key.slot(), tag,
      std::vector<int64_t>(plaintext.begin(), plaintext.end()));
}

absl::StatusOr<SecretKey> KeyGen(const FeInstance& instance, Tag tag,
                                 SparseFunctionVector function) {
  const uint64_t length = instance.input_length();
  if (function.dimension() != length * length) {
    return absl::InvalidArgumentError(
        absl::StrCat("function vector dimension ", function.dimension(),
                     " does not match L^2 = ", length * length));
  }
  internal::InstanceState& state = Access::State(instance);
  state.keygens.fetch_add(1);
  return Access::MakeSecretKey(Access::StatePtr(instance), tag,
                               std::move(function));
}

absl::StatusOr<WideInt> Decrypt(std::span<const Ciphertext> ciphertexts,
                                const SecretKey& key) {
  internal::InstanceState& state = Access::State(key);
  for (const Ciphertext& ct : ciphertexts) {
    if (ct.instance_id() != state.id) {
      return MakeFeError(
          FeError::kInstanceMismatch,
          absl::StrCat("ciphertext from instance ", ct.instance_id().value,
                       " presented to key of instance ", state.id.value));
    }
  }
  for (const Ciphertext& ct : ciphertexts) {
    if (ct.tag() != key.tag()) {
      return MakeFeError(FeError::kTagMismatch,
                         absl::StrCat("ciphertext tag ", ct.tag().value,
                                      " does not match key tag ",
                                      key.tag().value));
    }
  }
  const size_t num_slots = state.slot_lengths.size();
  std::vector<const Ciphertext*> by_slot(num_slots, nullptr);
  for (const Ciphertext& ct : ciphertexts) {
    if (by_slot[ct.slot()] != nullptr) {
      return MakeFeError(FeError::kDuplicateSlot,
                         absl::StrCat("slot ", ct.slot(), " presented twice"));
    }
    by_slot[ct.slot()] = &ct;
  }
  std::vector<int64_t> x;
  x.reserve(state.input_length);
  for (size_t k = 0; k < num_slots; ++k) {
    if (by_slot[k] == nullptr) {
      return MakeFeError(FeError::kMissingSlot,
                         absl::StrCat("no ciphertext for slot ", k));
    }
    const std::vector<int64_t>& payload = Access::Payload(*by_slot[k]);
    x.insert(x.end(), payload.begin(), payload.end());
  }
  auto value = SparseInnerKron(key.function_vector(), x);
  if (!value.ok()) {
    if (absl::IsOutOfRange(value.status())) {
      return MakeFeError(FeError::kOverflow, value.status().message());
    }
    return value.status();
  }
  state.decryptions.fetch_add(1);
  return *value;
}

AuditCounters GetAuditCounters(const FeInstance& instance) {
  internal::InstanceState& state = Access::State(instance);
  AuditCounters counters;
  counters.keygens = state.keygens.load();
  counters.decryptions = state.decryptions.load();
  for (const auto& n : state.encryptions_per_slot) {
    counters.encryptions_per_slot.push_back(n.load());
    counters.encryptions += counters.encryptions_per_slot.back();
  }
  return counters;
}

}  // namespace sfedv::fe
