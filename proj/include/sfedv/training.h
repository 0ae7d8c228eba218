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

#ifndef SFEDV_TRAINING_H_
#define SFEDV_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sfedv/baseline.h"
#include "sfedv/protocol.h"
#include "sfedv/tensor.h"

namespace sfedv {

// Row-aligned vertically partitioned data: client k holds the columns in
// client_features[k], client label_client also holds the labels.
struct VerticalDataset {
  std::vector<std::string> client_names;
  std::vector<std::vector<std::string>> feature_names;
  std::vector<RealMatrix> client_features;
  size_t label_client = 0;
  std::string label_name = "label";
  std::vector<double> labels;

  size_t rows() const { return labels.size(); }
  std::vector<size_t> FeatureCounts() const;
  absl::Status Validate() const;
  // Column-concatenation of all clients, in client order.
  CentralDataset Central() const;
  // Per-client shards restricted to `rows`.
  std::vector<ClientShard> Batch(std::span<const size_t> rows) const;
};

// Contiguous batches over a permutation of the rows that is reshuffled at the
// start of every epoch. A batch that runs past the end wraps into the next
// epoch's permutation.
class BatchScheduler {
 public:
  BatchScheduler(size_t num_rows, size_t batch_size, uint64_t seed);
  std::vector<size_t> Next();

 private:
  void Reshuffle();

  size_t batch_size_;
  std::mt19937_64 rng_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
};

struct TrainingConfig {
  ModelKind kind = ModelKind::kLinear;
  size_t iterations = 10;
  size_t batch_size = 16;
  double learning_rate = 0.05;
  double reg_lambda = 0.0;
  uint64_t seed = 1;
  ProtocolConfig protocol;

  absl::Status Validate() const;
};

struct TrainingResult {
  std::vector<IterationMetrics> history;
  ModelState final_state;
  // Flattened weights before the first and after every iteration.
  std::vector<std::vector<double>> weight_trajectory;
  // Filled when config.protocol.retain_transcripts is set.
  std::vector<IterationTranscript> transcripts;
  std::string message_log;
};

// T iterations of the protocol from zero weights, one fresh FE instance per
// iteration unless the debug reuse flag is set.
absl::StatusOr<TrainingResult> RunTraining(const VerticalDataset& dataset,
                                           const TrainingConfig& config);

struct CentralizedRun {
  std::vector<std::vector<double>> weight_trajectory;
};

// Plaintext gradient descent with the same batches and update rule (including
// the exact-mode weight grid). The lockstep reference for RunTraining.
absl::StatusOr<CentralizedRun> RunCentralizedTraining(
    const VerticalDataset& dataset, const TrainingConfig& config);

// Loss of the whole dataset: MSE or the Taylor surrogate.
absl::StatusOr<double> DatasetLoss(const VerticalDataset& dataset,
                                   ModelKind kind, std::span<const double> w);

}  // namespace sfedv

#endif  // SFEDV_TRAINING_H_
