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

#include "sfedv/training.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "sfedv/status_macros.h"

namespace sfedv {

std::vector<size_t> VerticalDataset::FeatureCounts() const {
  std::vector<size_t> counts;
  for (const RealMatrix& m : client_features) counts.push_back(m.cols());
  return counts;
}

absl::Status VerticalDataset::Validate() const {
  if (client_features.empty()) {
    return absl::InvalidArgumentError("dataset has no clients");
  }
  if (labels.empty()) return absl::InvalidArgumentError("dataset has no rows");
  if (label_client >= client_features.size()) {
    return absl::InvalidArgumentError("label client out of range");
  }
  for (size_t k = 0; k < client_features.size(); ++k) {
    if (client_features[k].empty() || client_features[k].rows() != rows()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", k, " does not hold ", rows(), " rows"));
    }
  }
  return absl::OkStatus();
}

CentralDataset VerticalDataset::Central() const {
  size_t cols = 0;
  for (const RealMatrix& m : client_features) cols += m.cols();
  const size_t n = client_features.empty() ? 0 : client_features[0].rows();
  CentralDataset central{RealMatrix(n, cols), labels};
  size_t col = 0;
  for (const RealMatrix& m : client_features) {
    for (size_t f = 0; f < m.cols(); ++f, ++col) {
      for (size_t s = 0; s < m.rows(); ++s) central.features(s, col) = m(s, f);
    }
  }
  return central;
}

std::vector<ClientShard> VerticalDataset::Batch(
    std::span<const size_t> rows) const {
  std::vector<ClientShard> shards;
  for (size_t k = 0; k < client_features.size(); ++k) {
    ClientShard shard{client_features[k].SelectRows(rows), std::nullopt};
    if (k == label_client) {
      std::vector<double> y;
      for (size_t r : rows) y.push_back(labels[r]);
      shard.labels = std::move(y);
    }
    shards.push_back(std::move(shard));
  }
  return shards;
}

BatchScheduler::BatchScheduler(size_t num_rows, size_t batch_size,
                               uint64_t seed)
    : batch_size_(batch_size), rng_(seed), order_(num_rows) {
  Reshuffle();
}

void BatchScheduler::Reshuffle() {
  std::iota(order_.begin(), order_.end(), size_t{0});
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::vector<size_t> BatchScheduler::Next() {
  std::vector<size_t> batch;
  batch.reserve(batch_size_);
  while (batch.size() < batch_size_) {
    if (cursor_ == order_.size()) Reshuffle();
    batch.push_back(order_[cursor_++]);
  }
  return batch;
}

absl::Status TrainingConfig::Validate() const {
  if (batch_size == 0) return absl::InvalidArgumentError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (!(reg_lambda >= 0.0)) {
    return absl::InvalidArgumentError("lambda must be non-negative");
  }
  return protocol.fixed_point.Validate();
}

namespace {

absl::Status CheckInputs(const VerticalDataset& dataset,
                         const TrainingConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(dataset.Validate());
  if (dataset.rows() < config.batch_size) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", dataset.rows(), " rows, fewer than batch ",
                     config.batch_size));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<TrainingResult> RunTraining(const VerticalDataset& dataset,
                                           const TrainingConfig& config) {
  RETURN_IF_ERROR(CheckInputs(dataset, config));
  const std::vector<size_t> counts = dataset.FeatureCounts();
  ModelState initial{WeightVector::Zeros(counts), config.learning_rate,
                     config.reg_lambda, config.kind};
  ASSIGN_OR_RETURN(SfedvSimulation sim,
                   SfedvSimulation::Create(initial, counts,
                                           dataset.label_client,
                                           config.protocol));
  TrainingResult result;
  result.weight_trajectory.push_back(initial.weights.Flatten());
  BatchScheduler scheduler(dataset.rows(), config.batch_size, config.seed);
  for (size_t t = 0; t < config.iterations; ++t) {
    const std::vector<size_t> rows = scheduler.Next();
    const std::vector<ClientShard> batch = dataset.Batch(rows);
    ASSIGN_OR_RETURN(IterationOutcome outcome, sim.RunIteration(batch));
    result.weight_trajectory.push_back(outcome.state.weights.Flatten());
    result.history.push_back(std::move(outcome.metrics));
  }
  result.final_state = sim.state();
  result.transcripts = sim.transcripts();
  result.message_log = sim.bus().ExportLog();
  return result;
}

absl::StatusOr<CentralizedRun> RunCentralizedTraining(
    const VerticalDataset& dataset, const TrainingConfig& config) {
  RETURN_IF_ERROR(CheckInputs(dataset, config));
  const CentralDataset central = dataset.Central();
  const int grid_bits = WeightGridBits(config.protocol, config.kind);
  std::vector<double> w(central.features.cols(), 0.0);
  CentralizedRun run;
  run.weight_trajectory.push_back(w);
  BatchScheduler scheduler(dataset.rows(), config.batch_size, config.seed);
  for (size_t t = 0; t < config.iterations; ++t) {
    const std::vector<size_t> rows = scheduler.Next();
    const RealMatrix x = central.features.SelectRows(rows);
    std::vector<double> y;
    for (size_t r : rows) y.push_back(central.labels[r]);
    ASSIGN_OR_RETURN(std::vector<double> g,
                     config.kind == ModelKind::kLinear
                         ? CentralizedGradientLinear(x, y, w, config.reg_lambda)
                         : CentralizedGradientLogisticTaylor(
                               x, y, w, config.reg_lambda));
    for (size_t f = 0; f < w.size(); ++f) {
      w[f] = w[f] - config.learning_rate * g[f];
      if (config.protocol.exact_mode) w[f] = SnapToGrid(w[f], grid_bits);
    }
    run.weight_trajectory.push_back(w);
  }
  return run;
}

absl::StatusOr<double> DatasetLoss(const VerticalDataset& dataset,
                                   ModelKind kind, std::span<const double> w) {
  const CentralDataset central = dataset.Central();
  return kind == ModelKind::kLinear
             ? MseLoss(central.features, central.labels, w)
             : TaylorLoss(central.features, central.labels, w);
}

}  // namespace sfedv
