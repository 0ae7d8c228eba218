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
#include "sfedv/protocol.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "sfedv/baseline.h"
#include "sfedv/status_macros.h"

namespace sfedv {
namespace internal {

class TrustedThirdParty {
 public:
  TrustedThirdParty(bool reuse_instance, bool tagged)
      : reuse_instance_(reuse_instance), tagged_(tagged) {}

  // Sets up (or, in reuse mode, keeps) the FE instance and sends every client
  // its encryption keys. The label holder also gets the label slot's key.
  absl::Status BeginIteration(uint64_t t, const Layout& layout,
                              size_t label_client, MessageBus& bus) {
    const std::vector<size_t> lengths = layout.SlotLengths();
    if (!instance_.has_value() || !reuse_instance_) {
      fe::SetupOptions options;
      options.single_encryption_per_tag = tagged_;
      ASSIGN_OR_RETURN(fe::SetupResult setup,
                       fe::Setup(layout.num_slots(), lengths, options));
      instance_ = std::move(setup.instance);
      keys_ = std::move(setup.encryption_keys);
    } else if (!std::equal(lengths.begin(), lengths.end(),
                           instance_->slot_lengths().begin(),
                           instance_->slot_lengths().end())) {
      return absl::FailedPreconditionError(
          "reused FE instance does not match this batch's slot lengths");
    }
    for (size_t k = 0; k < layout.num_clients; ++k) {
      DeliverEncryptionKeys body{{keys_[k]}};
      if (k == label_client) body.keys.push_back(keys_[layout.num_clients]);
      bus.Post({ActorId::Ttp(), ActorId::Client(k), t, std::move(body)});
    }
    return absl::OkStatus();
  }

  absl::Status HandleKeyRequests(uint64_t t, fe::Tag tag, MessageBus& bus) {
    for (Message& m : bus.Drain(ActorId::Ttp())) {
      auto* request = std::get_if<FunctionVectorRequest>(&m.body);
      if (request == nullptr || m.from != ActorId::Aggregator() ||
          m.iteration != t) {
        return absl::InternalError(
            absl::StrCat("TTP got unexpected ", BodyKind(m.body), " from ",
                         m.from.ToString()));
      }
      SecretKeyBatch reply;
      reply.keys.reserve(request->function_vectors.size());
      for (SparseFunctionVector& c : request->function_vectors) {
        ASSIGN_OR_RETURN(fe::SecretKey key,
                         fe::KeyGen(*instance_, tag, std::move(c)));
        reply.keys.push_back(std::move(key));
      }
      bus.Post({ActorId::Ttp(), ActorId::Aggregator(), t, std::move(reply)});
    }
    return absl::OkStatus();
  }

  const fe::FeInstance& instance() const { return *instance_; }

 private:
  bool reuse_instance_;
  bool tagged_;
  std::optional<fe::FeInstance> instance_;
  std::vector<fe::EncryptionKey> keys_;
};

class ClientActor {
 public:
  ClientActor(size_t index, bool holds_labels)
      : index_(index), holds_labels_(holds_labels) {}

  // Consumes this iteration's keys, encrypts vec(X_i) (and y, or y - 1/2 for
  // logistic models) and sends the ciphertexts to the aggregator. Clients
  // never receive anything from the aggregator.
  absl::Status EncryptBatch(uint64_t t, const ClientShard& shard,
                            ModelKind kind, const ProtocolConfig& config,
                            MessageBus& bus) {
    const ActorId self = ActorId::Client(index_);
    std::vector<fe::EncryptionKey> keys;
    for (Message& m : bus.Drain(self)) {
      auto* delivery = std::get_if<DeliverEncryptionKeys>(&m.body);
      if (delivery == nullptr || m.from != ActorId::Ttp() || m.iteration != t) {
        return absl::InternalError(
            absl::StrCat(self.ToString(), " got unexpected ", BodyKind(m.body),
                         " from ", m.from.ToString()));
      }
      for (auto& k : delivery->keys) keys.push_back(std::move(k));
    }
    const size_t expected_keys = holds_labels_ ? 2 : 1;
    if (keys.size() != expected_keys) {
      return absl::InternalError(absl::StrCat(self.ToString(), " holds ",
                                              keys.size(), " keys, expected ",
                                              expected_keys));
    }

    const RoundingPolicy policy = config.exact_mode ? RoundingPolicy::kExact
                                                    : RoundingPolicy::kNearest;
    const int bits = config.fixed_point.data_bits;
    uint64_t tag_value = config.tagged_mode ? t : 0;
    if (config.tag_fault_client == index_) ++tag_value;
    const fe::Tag tag{tag_value};

    ClientCiphertexts out;
    const std::vector<double> x = VecColumns(shard.features);
    ASSIGN_OR_RETURN(std::vector<int64_t> xq, QuantizeVector(x, bits, policy));
    ASSIGN_OR_RETURN(fe::Ciphertext ct, fe::Encrypt(keys[0], tag, xq));
    out.ciphertexts.push_back(std::move(ct));

    if (holds_labels_) {
      std::vector<double> y = *shard.labels;
      if (kind == ModelKind::kLogisticTaylor) {
        for (double& v : y) v -= 0.5;
      }
      ASSIGN_OR_RETURN(std::vector<int64_t> yq, QuantizeVector(y, bits, policy));
      ASSIGN_OR_RETURN(fe::Ciphertext ct_y, fe::Encrypt(keys[1], tag, yq));
      out.ciphertexts.push_back(std::move(ct_y));
    }
    bus.Post({self, ActorId::Aggregator(), t, std::move(out)});
    return absl::OkStatus();
  }

 private:
  size_t index_;
  bool holds_labels_;
};

class AggregatorActor {
 public:
  AggregatorActor(ModelState state, std::vector<size_t> feature_counts,
                  size_t label_client, ProtocolConfig config)
      : state_(std::move(state)),
        feature_counts_(std::move(feature_counts)),
        label_client_(label_client),
        config_(std::move(config)) {}

  struct Result {
    std::vector<double> decrypted;
    std::vector<double> gradient;
  };

  // Builds C^t from the current weights (w / 4 for logistic models) and asks
  // the TTP for the matching secret keys.
  absl::Status RequestKeys(uint64_t t, size_t batch_size, MessageBus& bus) {
    ASSIGN_OR_RETURN(layout_,
                     BuildLayout(feature_counts_.size(), batch_size,
                                 feature_counts_));
    const FixedPointConfig& fp = config_.fixed_point;
    const WeightVector weights = EncodedWeights();
    ASSIGN_OR_RETURN(QuantizedWeights wq,
                     QuantizeWeights(weights, fp.weight_bits,
                                     config_.exact_mode ? RoundingPolicy::kExact
                                                        : RoundingPolicy::kNearest));
    const int64_t unit = int64_t{1} << fp.weight_bits;
    ASSIGN_OR_RETURN(std::vector<SparseFunctionVector> c,
                     CGenAll(wq, unit, layout_));
    bus.Post({ActorId::Aggregator(), ActorId::Ttp(), t,
              FunctionVectorRequest{std::move(c)}});
    return absl::OkStatus();
  }

  // Decrypts the F slices, forms the gradient and updates the weights.
  absl::StatusOr<Result> Finish(uint64_t t, MessageBus& bus) {
    std::vector<fe::Ciphertext> ciphertexts;
    std::vector<fe::SecretKey> keys;
    std::vector<bool> heard_from(feature_counts_.size(), false);
    for (Message& m : bus.Drain(ActorId::Aggregator())) {
      if (m.iteration != t) {
        return absl::InternalError("aggregator got a stale message");
      }
      if (auto* cts = std::get_if<ClientCiphertexts>(&m.body)) {
        if (!m.from.is_client() || m.from.client >= heard_from.size() ||
            heard_from[m.from.client]) {
          return absl::InternalError(absl::StrCat(
              "unexpected ciphertexts from ", m.from.ToString()));
        }
        heard_from[m.from.client] = true;
        const size_t expected = m.from.client == label_client_ ? 2 : 1;
        if (cts->ciphertexts.size() != expected) {
          return absl::InternalError(absl::StrCat(
              m.from.ToString(), " sent ", cts->ciphertexts.size(),
              " ciphertexts, expected ", expected));
        }
        for (auto& ct : cts->ciphertexts) ciphertexts.push_back(std::move(ct));
      } else if (auto* batch = std::get_if<SecretKeyBatch>(&m.body)) {
        if (m.from != ActorId::Ttp()) {
          return absl::InternalError("secret keys must come from the TTP");
        }
        for (auto& k : batch->keys) keys.push_back(std::move(k));
      } else {
        return absl::InternalError(absl::StrCat(
            "aggregator got unexpected ", BodyKind(m.body)));
      }
    }
    if (keys.size() != layout_.total_features) {
      return absl::InternalError(absl::StrCat("received ", keys.size(),
                                              " secret keys, expected ",
                                              layout_.total_features));
    }

    const int scale_exp = config_.fixed_point.result_scale_exp();
    Result result;
    result.decrypted.reserve(keys.size());
    for (const fe::SecretKey& key : keys) {
      ASSIGN_OR_RETURN(WideInt raw, fe::Decrypt(ciphertexts, key));
      result.decrypted.push_back(Dequantize({raw, scale_exp}));
    }

    const double batch = static_cast<double>(layout_.batch_size);
    const double scale = state_.kind == ModelKind::kLinear ? -2.0 / batch
                                                           : -1.0 / batch;
    const std::vector<double> w = state_.weights.Flatten();
    result.gradient.resize(w.size());
    std::vector<double> next(w.size());
    const int grid_bits = WeightGridBits(config_, state_.kind);
    for (size_t f = 0; f < w.size(); ++f) {
      result.gradient[f] = scale * result.decrypted[f] + state_.reg_lambda * w[f];
      next[f] = w[f] - state_.learning_rate * result.gradient[f];
      if (config_.exact_mode) next[f] = SnapToGrid(next[f], grid_bits);
    }
    ASSIGN_OR_RETURN(state_.weights, WeightVector::FromFlat(next, feature_counts_));

    if (config_.retain_transcripts) {
      transcripts_.push_back({t, std::move(ciphertexts), std::move(keys)});
    }
    return result;
  }

  WeightVector EncodedWeights() const {
    if (state_.kind == ModelKind::kLogisticTaylor) {
      return LogisticAdjust(state_.weights, {}).weights;
    }
    return state_.weights;
  }

  const ModelState& state() const { return state_; }
  const std::vector<IterationTranscript>& transcripts() const {
    return transcripts_;
  }

 private:
  ModelState state_;
  std::vector<size_t> feature_counts_;
  size_t label_client_;
  ProtocolConfig config_;
  Layout layout_;
  std::vector<IterationTranscript> transcripts_;
};

}  // namespace internal

namespace {

double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

CentralDataset ConcatenateBatch(std::span<const ClientShard> batch) {
  size_t cols = 0;
  for (const ClientShard& shard : batch) cols += shard.features.cols();
  const size_t rows = batch.front().features.rows();
  CentralDataset central{RealMatrix(rows, cols), {}};
  size_t col = 0;
  for (const ClientShard& shard : batch) {
    for (size_t f = 0; f < shard.features.cols(); ++f, ++col) {
      for (size_t s = 0; s < rows; ++s) {
        central.features(s, col) = shard.features(s, f);
      }
    }
    if (shard.labels.has_value()) central.labels = *shard.labels;
  }
  return central;
}

}  // namespace

absl::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "logistic";
}

absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "logistic") return ModelKind::kLogisticTaylor;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown model kind '", name, "'"));
}

absl::Status ModelState::Validate(std::span<const size_t> feature_counts) const {
  if (!weights.Matches(feature_counts)) {
    return absl::InvalidArgumentError(
        "weight segments do not match the feature partition");
  }
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (!(reg_lambda >= 0.0)) {
    return absl::InvalidArgumentError("regularization must be non-negative");
  }
  return absl::OkStatus();
}

int WeightGridBits(const ProtocolConfig& config, ModelKind kind) {
  return config.fixed_point.weight_bits -
         (kind == ModelKind::kLogisticTaylor ? 2 : 0);
}

SfedvSimulation::SfedvSimulation() = default;
SfedvSimulation::SfedvSimulation(SfedvSimulation&&) noexcept = default;
SfedvSimulation& SfedvSimulation::operator=(SfedvSimulation&&) noexcept =
    default;
SfedvSimulation::~SfedvSimulation() = default;

absl::StatusOr<SfedvSimulation> SfedvSimulation::Create(
    ModelState initial, std::vector<size_t> feature_counts,
    size_t label_client, ProtocolConfig config) {
  if (feature_counts.empty()) {
    return absl::InvalidArgumentError("need at least one client");
  }
  if (label_client >= feature_counts.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label client ", label_client, " out of range"));
  }
  RETURN_IF_ERROR(config.fixed_point.Validate());
  RETURN_IF_ERROR(initial.Validate(feature_counts));
  if (config.exact_mode && WeightGridBits(config, initial.kind) < 0) {
    return absl::InvalidArgumentError(
        "exact logistic training needs at least 2 weight bits");
  }
  SfedvSimulation sim;
  sim.feature_counts_ = feature_counts;
  sim.label_client_ = label_client;
  sim.config_ = config;
  sim.ttp_ = std::make_unique<internal::TrustedThirdParty>(
      config.reuse_instance, config.tagged_mode);
  for (size_t k = 0; k < feature_counts.size(); ++k) {
    sim.clients_.emplace_back(k, k == label_client);
  }
  sim.aggregator_ = std::make_unique<internal::AggregatorActor>(
      std::move(initial), std::move(feature_counts), label_client, config);
  return sim;
}

const ModelState& SfedvSimulation::state() const {
  return aggregator_->state();
}

const std::vector<IterationTranscript>& SfedvSimulation::transcripts() const {
  return aggregator_->transcripts();
}

absl::Status SfedvSimulation::CheckBatch(
    std::span<const ClientShard> batch) const {
  if (batch.size() != feature_counts_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", batch.size(), " shards for ", feature_counts_.size(),
        " clients"));
  }
  const size_t rows = batch.front().features.rows();
  for (size_t k = 0; k < batch.size(); ++k) {
    const ClientShard& shard = batch[k];
    if (shard.features.empty() || shard.features.rows() != rows ||
        shard.features.cols() != feature_counts_[k]) {
      return absl::InvalidArgumentError(
          absl::StrCat("shard ", k, " has shape ", shard.features.rows(), "x",
                       shard.features.cols(), ", expected ", rows, "x",
                       feature_counts_[k]));
    }
    if (shard.labels.has_value() != (k == label_client_)) {
      return absl::InvalidArgumentError(
          absl::StrCat("exactly client ", label_client_,
                       " must hold labels; shard ", k, " disagrees"));
    }
    if (shard.labels.has_value() && shard.labels->size() != rows) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label length ", shard.labels->size(), " does not match ", rows));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<IterationOutcome> SfedvSimulation::RunIteration(
    std::span<const ClientShard> batch) {
  RETURN_IF_ERROR(CheckBatch(batch));
  const uint64_t t = next_iteration_++;
  const ModelState before = aggregator_->state();
  const std::vector<double> w = before.weights.Flatten();
  const size_t batch_size = batch.front().features.rows();
  ASSIGN_OR_RETURN(Layout layout, BuildLayout(feature_counts_.size(),
                                              batch_size, feature_counts_));
  const FixedPointConfig& fp = config_.fixed_point;

  // Everything the pipeline encrypts or encodes, in the encoded domain.
  CentralDataset central = ConcatenateBatch(batch);
  std::vector<double> encoded_labels = central.labels;
  if (before.kind == ModelKind::kLogisticTaylor) {
    for (double& y : encoded_labels) y -= 0.5;
  }
  const double max_abs_x =
      std::max(MaxAbs(central.features.data()), MaxAbs(encoded_labels));
  const double max_abs_w =
      MaxAbs(aggregator_->EncodedWeights().Flatten());
  const WideInt bound =
      OverflowBound(batch_size, layout.total_features, fp.data_bits,
                    fp.weight_bits, max_abs_x, max_abs_w);
  if (bound >= kAccumulatorLimit) {
    return absl::OutOfRangeError(absl::StrCat(
        "iteration ", t, ": worst-case accumulator ", WideIntToString(bound),
        " reaches 2^126; lower the fixed-point bits or rescale the data"));
  }

  const fe::Tag key_tag{config_.tagged_mode ? t : 0};
  fe::AuditCounters delta;
  auto run_protocol = [&]() -> absl::StatusOr<internal::AggregatorActor::Result> {
    RETURN_IF_ERROR(ttp_->BeginIteration(t, layout, label_client_, bus_));
    const fe::AuditCounters start = fe::GetAuditCounters(ttp_->instance());
    for (size_t k = 0; k < clients_.size(); ++k) {
      RETURN_IF_ERROR(
          clients_[k].EncryptBatch(t, batch[k], before.kind, config_, bus_));
    }
    RETURN_IF_ERROR(aggregator_->RequestKeys(t, batch_size, bus_));
    RETURN_IF_ERROR(ttp_->HandleKeyRequests(t, key_tag, bus_));
    ASSIGN_OR_RETURN(auto result, aggregator_->Finish(t, bus_));
    const fe::AuditCounters end = fe::GetAuditCounters(ttp_->instance());
    delta.encryptions_per_slot.assign(end.encryptions_per_slot.size(), 0);
    for (size_t k = 0; k < end.encryptions_per_slot.size(); ++k) {
      delta.encryptions_per_slot[k] =
          end.encryptions_per_slot[k] - start.encryptions_per_slot[k];
    }
    delta.decryptions = end.decryptions - start.decryptions;
    delta.keygens = end.keygens - start.keygens;
    return result;
  };
  auto result = run_protocol();
  if (!result.ok()) {
    // Discard whatever the aborted iteration left in flight.
    for (size_t k = 0; k < clients_.size(); ++k) bus_.Drain(ActorId::Client(k));
    bus_.Drain(ActorId::Aggregator());
    bus_.Drain(ActorId::Ttp());
    absl::Status wrapped(result.status().code(),
                         absl::StrCat("iteration ", t, ": ",
                                      result.status().message()));
    result.status().ForEachPayload(
        [&](absl::string_view url, const absl::Cord& payload) {
          wrapped.SetPayload(url, payload);
        });
    return wrapped;
  }

  IterationOutcome outcome;
  outcome.decrypted = std::move(result->decrypted);
  outcome.gradient = std::move(result->gradient);
  outcome.state = aggregator_->state();

  IterationMetrics& metrics = outcome.metrics;
  metrics.iteration = t;
  metrics.gradient = outcome.gradient;
  metrics.decryptions = delta.decryptions;
  metrics.keygens = delta.keygens;
  for (size_t k = 0; k < clients_.size(); ++k) {
    uint64_t n = delta.encryptions_per_slot[k];
    if (k == label_client_) n += delta.encryptions_per_slot.back();
    metrics.encryptions_per_client.push_back(n);
  }

  const bool linear = before.kind == ModelKind::kLinear;
  ASSIGN_OR_RETURN(
      std::vector<double> oracle,
      linear ? CentralizedGradientLinear(central.features, central.labels, w,
                                         before.reg_lambda)
             : CentralizedGradientLogisticTaylor(
                   central.features, central.labels, w, before.reg_lambda));
  for (size_t f = 0; f < oracle.size(); ++f) {
    metrics.max_abs_grad_diff_vs_oracle =
        std::max(metrics.max_abs_grad_diff_vs_oracle,
                 std::fabs(outcome.gradient[f] - oracle[f]));
  }
  if (!config_.exact_mode) {
    const double scale = (linear ? 2.0 : 1.0) / static_cast<double>(batch_size);
    metrics.grad_diff_bound =
        scale * InnerProductErrorBound(batch_size, layout.total_features,
                                       fp.data_bits, fp.weight_bits, max_abs_x,
                                       max_abs_w);
  }
  ASSIGN_OR_RETURN(metrics.loss,
                   linear ? MseLoss(central.features, central.labels, w)
                          : TaylorLoss(central.features, central.labels, w));
  return outcome;
}

absl::StatusOr<IterationOutcome> RunIteration(
    const ModelState& state, std::span<const ClientShard> shards,
    const ProtocolConfig& config) {
  std::vector<size_t> feature_counts;
  size_t label_client = shards.size();
  for (size_t k = 0; k < shards.size(); ++k) {
    feature_counts.push_back(shards[k].features.cols());
    if (shards[k].labels.has_value()) label_client = k;
  }
  if (label_client == shards.size()) {
    return absl::InvalidArgumentError("no shard carries labels");
  }
  ASSIGN_OR_RETURN(SfedvSimulation sim,
                   SfedvSimulation::Create(state, std::move(feature_counts),
                                           label_client, config));
  return sim.RunIteration(shards);
}

bool ProbeReport::passed() const {
  return cross_attempts > 0 && cross_successes == 0 &&
         control_successes == control_attempts;
}

std::string ProbeReport::ToString() const {
  std::vector<std::string> failures;
  for (const auto& [name, n] : cross_failures) {
    failures.push_back(absl::StrCat(name, "=", n));
  }
  return absl::StrCat("cross attempts=", cross_attempts,
                      " successes=", cross_successes, " failures{",
                      absl::StrJoin(failures, ","), "} controls ",
                      control_successes, "/", control_attempts);
}

ProbeReport ProbeMixAndMatch(std::span<const IterationTranscript> history) {
  ProbeReport report;
  for (const IterationTranscript& cts : history) {
    for (const IterationTranscript& keys : history) {
      if (keys.keys.empty()) continue;
      const bool control = cts.iteration == keys.iteration;
      auto value = fe::Decrypt(cts.ciphertexts, keys.keys.front());
      if (control) {
        ++report.control_attempts;
        if (value.ok()) ++report.control_successes;
        continue;
      }
      ++report.cross_attempts;
      if (value.ok()) {
        ++report.cross_successes;
      } else {
        auto kind = fe::GetFeError(value.status());
        ++report.cross_failures[kind.has_value()
                                    ? std::string(fe::FeErrorName(*kind))
                                    : std::string("Other")];
      }
    }
  }
  return report;
}

}  // namespace sfedv
