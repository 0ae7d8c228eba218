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

#ifndef SFEDV_PROTOCOL_H_
#define SFEDV_PROTOCOL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sfedv/fe_ideal.h"
#include "sfedv/fixed_point.h"
#include "sfedv/function_vector.h"
#include "sfedv/message_bus.h"
#include "sfedv/tensor.h"

namespace sfedv {

enum class ModelKind { kLinear, kLogisticTaylor };

absl::string_view ModelKindName(ModelKind kind);
absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name);

// Aggregator-owned model. The regularizer is R(w) = ||w||^2 / 2.
struct ModelState {
  WeightVector weights;
  double learning_rate = 0.01;
  double reg_lambda = 0.0;
  ModelKind kind = ModelKind::kLinear;

  absl::Status Validate(std::span<const size_t> feature_counts) const;
};

// One client's rows for the current batch. Exactly one client carries labels.
struct ClientShard {
  RealMatrix features;
  std::optional<std::vector<double>> labels;
};

struct ProtocolConfig {
  FixedPointConfig fixed_point;
  // Every quantization must be exact and the aggregator keeps its weights on
  // the grid it can encode, so the pipeline equals plaintext arithmetic.
  bool exact_mode = false;
  // Tag every ciphertext and key with the iteration index.
  bool tagged_mode = false;
  // Debug only: the TTP keeps one FE instance for the whole run.
  bool reuse_instance = false;
  // Keep every iteration's ciphertexts and keys for the mix-and-match probe.
  bool retain_transcripts = false;
  // Debug only: this client encrypts under tag + 1.
  std::optional<size_t> tag_fault_client;
};

// Fractional bits of the grid the aggregator's weights live on in exact mode.
// The logistic path encodes w / 4, which costs two bits.
int WeightGridBits(const ProtocolConfig& config, ModelKind kind);

struct IterationMetrics {
  uint64_t iteration = 0;
  std::vector<uint64_t> encryptions_per_client;
  uint64_t decryptions = 0;
  uint64_t keygens = 0;
  std::vector<double> gradient;
  // Loss of the batch at the pre-update weights: MSE for linear models, the
  // Taylor surrogate for logistic ones.
  double loss = 0.0;
  double max_abs_grad_diff_vs_oracle = 0.0;
  // Rounding bound the diff must respect; zero in exact mode.
  double grad_diff_bound = 0.0;
};

struct IterationOutcome {
  // Decrypted slices ((u^T X_i)[p] for linear models), gradient order.
  std::vector<double> decrypted;
  std::vector<double> gradient;
  ModelState state;
  IterationMetrics metrics;
};

struct IterationTranscript {
  uint64_t iteration = 0;
  std::vector<fe::Ciphertext> ciphertexts;
  std::vector<fe::SecretKey> keys;
};

namespace internal {
class TrustedThirdParty;
class ClientActor;
class AggregatorActor;
}  // namespace internal

// TTP, aggregator and N clients exchanging messages over one MessageBus. Each
// RunIteration executes the fixed schedule TTP -> clients -> aggregator -> TTP
// -> aggregator, then checks the produced gradient against the centralized
// plaintext formula.
class SfedvSimulation {
 public:
  static absl::StatusOr<SfedvSimulation> Create(
      ModelState initial, std::vector<size_t> feature_counts,
      size_t label_client, ProtocolConfig config);

  SfedvSimulation(SfedvSimulation&&) noexcept;
  SfedvSimulation& operator=(SfedvSimulation&&) noexcept;
  ~SfedvSimulation();

  // `batch[k]` is client k's S rows. Any FE error aborts the iteration and
  // leaves the model unchanged.
  absl::StatusOr<IterationOutcome> RunIteration(
      std::span<const ClientShard> batch);

  const ModelState& state() const;
  const MessageBus& bus() const { return bus_; }
  const std::vector<IterationTranscript>& transcripts() const;
  uint64_t iterations_run() const { return next_iteration_; }

 private:
  SfedvSimulation();

  absl::Status CheckBatch(std::span<const ClientShard> batch) const;

  std::vector<size_t> feature_counts_;
  size_t label_client_ = 0;
  ProtocolConfig config_;
  MessageBus bus_;
  uint64_t next_iteration_ = 0;
  std::unique_ptr<internal::TrustedThirdParty> ttp_;
  std::vector<internal::ClientActor> clients_;
  std::unique_ptr<internal::AggregatorActor> aggregator_;
};

// One iteration on a throwaway simulation. The label holder is whichever
// shard carries labels.
absl::StatusOr<IterationOutcome> RunIteration(
    const ModelState& state, std::span<const ClientShard> shards,
    const ProtocolConfig& config);

struct ProbeReport {
  size_t cross_attempts = 0;
  size_t cross_successes = 0;
  std::map<std::string, size_t> cross_failures;  // By FE error name.
  size_t control_attempts = 0;
  size_t control_successes = 0;

  // Every cross-iteration attempt was rejected and every control succeeded.
  bool passed() const;
  std::string ToString() const;
};

// Mix-and-match probe: decrypts the ciphertexts of iteration t with the first
// secret key of iteration t' for every ordered pair t != t', plus the t == t'
// controls.
ProbeReport ProbeMixAndMatch(std::span<const IterationTranscript> history);

}  // namespace sfedv

#endif  // SFEDV_PROTOCOL_H_
