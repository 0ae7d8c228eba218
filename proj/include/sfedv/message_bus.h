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

#ifndef SFEDV_MESSAGE_BUS_H_
#define SFEDV_MESSAGE_BUS_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include "absl/strings/string_view.h"
#include <variant>
#include <vector>

#include "sfedv/fe_ideal.h"
#include "sfedv/sparse_function_vector.h"

namespace sfedv {

struct ActorId {
  enum class Role { kTtp, kAggregator, kClient };

  Role role = Role::kTtp;
  size_t client = 0;  // Meaningful for kClient only.

  static ActorId Ttp() { return {Role::kTtp, 0}; }
  static ActorId Aggregator() { return {Role::kAggregator, 0}; }
  static ActorId Client(size_t k) { return {Role::kClient, k}; }

  bool is_client() const { return role == Role::kClient; }
  std::string ToString() const;

  friend bool operator==(const ActorId&, const ActorId&) = default;
};

// TTP -> client.
struct DeliverEncryptionKeys {
  std::vector<fe::EncryptionKey> keys;
};
// Client -> aggregator. Two ciphertexts from the label holder, one otherwise.
struct ClientCiphertexts {
  std::vector<fe::Ciphertext> ciphertexts;
};
// Aggregator -> TTP.
struct FunctionVectorRequest {
  std::vector<SparseFunctionVector> function_vectors;
};
// TTP -> aggregator, in request order.
struct SecretKeyBatch {
  std::vector<fe::SecretKey> keys;
};

using MessageBody = std::variant<DeliverEncryptionKeys, ClientCiphertexts,
                                 FunctionVectorRequest, SecretKeyBatch>;

absl::string_view BodyKind(const MessageBody& body);

struct Message {
  ActorId from;
  ActorId to;
  uint64_t iteration = 0;
  MessageBody body;
};

// Transport-level audit record. Sizes only, never contents.
struct MessageRecord {
  uint64_t sequence = 0;
  ActorId from;
  ActorId to;
  uint64_t iteration = 0;
  std::string kind;
  // Keys, ciphertexts or function vectors carried.
  size_t items = 0;
  // Sum of slot lengths, ciphertext lengths or nonzero counts.
  size_t elements = 0;
};

// Single-threaded FIFO bus. Delivery order is posting order per recipient.
class MessageBus {
 public:
  void Post(Message message);
  // Removes and returns every pending message addressed to `to`.
  std::vector<Message> Drain(const ActorId& to);
  size_t pending() const { return queue_.size(); }

  const std::vector<MessageRecord>& log() const { return log_; }
  // One JSON object per line: seq, from, to, iteration, kind, items, elements.
  std::string ExportLog() const;

 private:
  std::deque<Message> queue_;
  std::vector<MessageRecord> log_;
};

}  // namespace sfedv

#endif  // SFEDV_MESSAGE_BUS_H_
