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
#include "sfedv/message_bus.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace sfedv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

MessageRecord Summarize(const Message& m, uint64_t sequence) {
  MessageRecord r{sequence, m.from, m.to, m.iteration,
                  std::string(BodyKind(m.body)), 0, 0};
  std::visit(Overloaded{
                 [&](const DeliverEncryptionKeys& b) {
                   r.items = b.keys.size();
                   for (const auto& k : b.keys) r.elements += k.slot_length();
                 },
                 [&](const ClientCiphertexts& b) {
                   r.items = b.ciphertexts.size();
                   for (const auto& c : b.ciphertexts) r.elements += c.length();
                 },
                 [&](const FunctionVectorRequest& b) {
                   r.items = b.function_vectors.size();
                   for (const auto& c : b.function_vectors) r.elements += c.nnz();
                 },
                 [&](const SecretKeyBatch& b) {
                   r.items = b.keys.size();
                   for (const auto& k : b.keys) {
                     r.elements += k.function_vector().nnz();
                   }
                 },
             },
             m.body);
  return r;
}

}  // namespace

std::string ActorId::ToString() const {
  switch (role) {
    case Role::kTtp:
      return "ttp";
    case Role::kAggregator:
      return "aggregator";
    case Role::kClient:
      return absl::StrCat("client:", client);
  }
  return "unknown";
}

absl::string_view BodyKind(const MessageBody& body) {
  return std::visit(
      Overloaded{
          [](const DeliverEncryptionKeys&) { return "DeliverEK"; },
          [](const ClientCiphertexts&) { return "ClientCiphertexts"; },
          [](const FunctionVectorRequest&) { return "FuncVecRequest"; },
          [](const SecretKeyBatch&) { return "SecretKeys"; },
      },
      body);
}

void MessageBus::Post(Message message) {
  log_.push_back(Summarize(message, log_.size()));
  queue_.push_back(std::move(message));
}

std::vector<Message> MessageBus::Drain(const ActorId& to) {
  std::vector<Message> out;
  auto keep = std::stable_partition(queue_.begin(), queue_.end(),
                                    [&](const Message& m) { return !(m.to == to); });
  std::move(keep, queue_.end(), std::back_inserter(out));
  queue_.erase(keep, queue_.end());
  return out;
}

std::string MessageBus::ExportLog() const {
  std::string out;
  for (const MessageRecord& r : log_) {
    nlohmann::ordered_json j;
    j["seq"] = r.sequence;
    j["from"] = r.from.ToString();
    j["to"] = r.to.ToString();
    j["iteration"] = r.iteration;
    j["kind"] = r.kind;
    j["items"] = r.items;
    j["elements"] = r.elements;
    absl::StrAppend(&out, j.dump(), "\n");
  }
  return out;
}

}  // namespace sfedv
