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
#include "sfedv/cli.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "sfedv/baseline.h"
#include "sfedv/function_vector.h"
#include "sfedv/status_macros.h"
#include "sfedv/tensor.h"

namespace sfedv::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

double Norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string DescribeStatus(const absl::Status& status) {
  if (auto kind = fe::GetFeError(status)) {
    return absl::StrCat(fe::FeErrorName(*kind), ": ", status.message());
  }
  return std::string(status.ToString());
}

// Three-way agreement of <c_{i,p}, x (x) x> on random integer instances: the
// sparse evaluation, a dense Kronecker oracle, and (u^T X_i)[p] directly.
CheckResult CheckFunctionVectors(uint64_t seed, size_t instances) {
  CheckResult check{"function_vectors", true, ""};
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  size_t compared = 0;
  for (size_t n = 0; n < instances && check.passed; ++n) {
    const size_t num_clients = uniform(1, 3);
    const size_t batch = uniform(1, 8);
    std::vector<size_t> counts;
    for (size_t i = 0; i < num_clients; ++i) counts.push_back(uniform(1, 4));
    auto layout = BuildLayout(num_clients, batch, counts);
    if (!layout.ok()) return {check.name, false, layout.status().ToString()};

    std::vector<IntMatrix> xs;
    QuantizedWeights w;
    std::vector<int64_t> x;
    for (size_t i = 0; i < num_clients; ++i) {
      IntMatrix m(batch, counts[i]);
      for (size_t s = 0; s < batch; ++s) {
        for (size_t f = 0; f < counts[i]; ++f) m(s, f) = uniform(-8, 8);
      }
      const std::vector<int64_t> col = VecColumns(m);
      x.insert(x.end(), col.begin(), col.end());
      xs.push_back(std::move(m));
      std::vector<int64_t> wi;
      for (size_t f = 0; f < counts[i]; ++f) wi.push_back(uniform(-4, 4));
      w.push_back(std::move(wi));
    }
    std::vector<int64_t> y;
    for (size_t s = 0; s < batch; ++s) y.push_back(uniform(-8, 8));
    x.insert(x.end(), y.begin(), y.end());

    std::vector<int64_t> u = y;
    for (size_t s = 0; s < batch; ++s) {
      for (size_t j = 0; j < num_clients; ++j) {
        for (size_t f = 0; f < counts[j]; ++f) u[s] -= xs[j](s, f) * w[j][f];
      }
    }
    auto square = DenseKron(x);
    if (!square.ok()) return {check.name, false, square.status().ToString()};
    for (size_t i = 0; i < num_clients && check.passed; ++i) {
      for (size_t p = 0; p < counts[i]; ++p) {
        auto c = CGen(w, 1, *layout, i, p);
        if (!c.ok()) return {check.name, false, c.status().ToString()};
        auto sparse = SparseInnerKron(*c, x);
        auto dense_c = c->ToDense();
        if (!sparse.ok() || !dense_c.ok()) {
          return {check.name, false, "evaluation failed"};
        }
        auto dense = DenseInnerProduct(*dense_c, *square);
        int64_t direct = 0;
        for (size_t s = 0; s < batch; ++s) direct += u[s] * xs[i](s, p);
        if (!dense.ok() || *sparse != *dense || *sparse != direct) {
          check.passed = false;
          check.detail = absl::StrCat("mismatch at instance ", n, " (i=", i,
                                      ", p=", p, ")");
          break;
        }
        ++compared;
      }
    }
  }
  if (check.passed) {
    check.detail = absl::StrCat(compared, " slices over ", instances,
                                " instances agree three ways");
  }
  return check;
}

CheckResult CheckGradientOracle(const TrainingResult& result, bool exact) {
  CheckResult check{"gradient_vs_oracle", true, ""};
  double worst = 0.0;
  for (const IterationMetrics& m : result.history) {
    worst = std::max(worst, m.max_abs_grad_diff_vs_oracle);
    const bool ok = exact ? m.max_abs_grad_diff_vs_oracle == 0.0
                          : m.max_abs_grad_diff_vs_oracle <= m.grad_diff_bound;
    if (!ok) {
      check.passed = false;
      check.detail = absl::StrCat("iteration ", m.iteration, ": diff ",
                                  m.max_abs_grad_diff_vs_oracle, " > bound ",
                                  m.grad_diff_bound);
      return check;
    }
  }
  check.detail = absl::StrCat("max diff ", worst, exact ? " (exact)" : "");
  return check;
}

CheckResult CheckFiniteDifferences(const VerticalDataset& dataset,
                                   const TrainingConfig& config,
                                   const std::vector<double>& w) {
  CheckResult check{"oracle_vs_finite_difference", true, ""};
  const CentralDataset central = dataset.Central();
  const bool linear = config.kind == ModelKind::kLinear;
  auto formula = linear ? CentralizedGradientLinear(central.features,
                                                    central.labels, w, 0.0)
                        : CentralizedGradientLogisticTaylor(
                              central.features, central.labels, w, 0.0);
  if (!formula.ok()) return {check.name, false, formula.status().ToString()};
  const std::vector<double> fd = FiniteDifferenceGradient(
      [&](std::span<const double> point) {
        auto loss = linear ? MseLoss(central.features, central.labels, point)
                           : TaylorLoss(central.features, central.labels, point);
        return loss.ok() ? *loss : NAN;
      },
      w, 1e-4);
  double scale = 1.0;
  for (double g : *formula) scale = std::max(scale, std::fabs(g));
  double worst = 0.0;
  for (size_t f = 0; f < fd.size(); ++f) {
    worst = std::max(worst, std::fabs(fd[f] - (*formula)[f]) / scale);
  }
  check.passed = worst <= 1e-6;
  check.detail = absl::StrCat("max relative diff ", worst);
  return check;
}

CheckResult CheckCounts(const TrainingResult& result,
                        const VerticalDataset& dataset) {
  CheckResult check{"counts", true, ""};
  const size_t total_features = dataset.Central().features.cols();
  for (const IterationMetrics& m : result.history) {
    for (size_t k = 0; k < m.encryptions_per_client.size(); ++k) {
      const uint64_t expected = k == dataset.label_client ? 2 : 1;
      if (m.encryptions_per_client[k] != expected) {
        return {check.name, false,
                absl::StrCat("iteration ", m.iteration, ": client ", k,
                             " encrypted ", m.encryptions_per_client[k],
                             " times, expected ", expected)};
      }
    }
    if (m.decryptions != total_features || m.keygens != total_features) {
      return {check.name, false,
              absl::StrCat("iteration ", m.iteration, ": ", m.decryptions,
                           " decryptions and ", m.keygens,
                           " keygens, expected ", total_features)};
    }
  }
  check.detail = absl::StrCat(result.history.size(),
                              " iterations: 1 encryption per client (2 for the "
                              "label holder), ",
                              total_features, " decryptions");
  return check;
}

CheckResult CheckOneWayFlow(const std::string& message_log) {
  CheckResult check{"one_way_client_flow", true, ""};
  size_t records = 0;
  for (absl::string_view line : absl::StrSplit(message_log, '\n')) {
    if (line.empty()) continue;
    ++records;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) return {check.name, false, "unparseable log line"};
    const std::string to = j.value("to", "");
    if (to.rfind("client:", 0) == 0 &&
        (j.value("from", "") != "ttp" || j.value("kind", "") != "DeliverEK")) {
      return {check.name, false,
              absl::StrCat("client received ", j.value("kind", ""), " from ",
                           j.value("from", ""))};
    }
  }
  check.detail = absl::StrCat(records,
                              " messages; clients only receive keys from the TTP");
  return check;
}

}  // namespace

absl::StatusOr<VerticalDataset> ResolveDataset(const RunOptions& options) {
  if (options.synthetic) {
    SyntheticOptions synth = options.synthetic_options;
    synth.kind = options.training.kind;
    ASSIGN_OR_RETURN(SyntheticData data, GenerateSynthetic(synth));
    return std::move(data.dataset);
  }
  if (options.dataset_path.empty() || options.partition_path.empty()) {
    return absl::InvalidArgumentError(
        "need --dataset and --partition, or --synthetic");
  }
  return LoadAndPartition(options.dataset_path, options.partition_path);
}

std::string FormatMetrics(const TrainingResult& result,
                          const TrainingConfig& config,
                          const VerticalDataset& dataset) {
  std::string out;
  double worst = 0.0;
  for (const IterationMetrics& m : result.history) {
    ordered_json j;
    j["type"] = "iteration";
    j["iteration"] = m.iteration;
    j["loss"] = m.loss;
    j["grad_norm"] = Norm2(m.gradient);
    j["max_abs_grad_diff_vs_oracle"] = m.max_abs_grad_diff_vs_oracle;
    j["grad_diff_bound"] = m.grad_diff_bound;
    j["encryptions_per_client"] = m.encryptions_per_client;
    j["decryptions"] = m.decryptions;
    j["keygens"] = m.keygens;
    j["gradient"] = m.gradient;
    absl::StrAppend(&out, j.dump(), "\n");
    worst = std::max(worst, m.max_abs_grad_diff_vs_oracle);
  }
  const std::vector<double> w = result.final_state.weights.Flatten();
  auto final_loss = DatasetLoss(dataset, config.kind, w);
  ordered_json s;
  s["type"] = "summary";
  s["model"] = std::string(ModelKindName(config.kind));
  s["iterations"] = result.history.size();
  s["batch_size"] = config.batch_size;
  s["learning_rate"] = config.learning_rate;
  s["lambda"] = config.reg_lambda;
  s["seed"] = config.seed;
  s["data_bits"] = config.protocol.fixed_point.data_bits;
  s["weight_bits"] = config.protocol.fixed_point.weight_bits;
  s["exact_mode"] = config.protocol.exact_mode;
  s["tagged_mode"] = config.protocol.tagged_mode;
  s["clients"] = dataset.client_features.size();
  s["features"] = w.size();
  s["rows"] = dataset.rows();
  s["final_loss"] = final_loss.ok() ? *final_loss : NAN;
  s["max_abs_grad_diff_vs_oracle"] = worst;
  s["final_weights"] = w;
  absl::StrAppend(&out, s.dump(), "\n");
  return out;
}

absl::Status CmdTrain(const RunOptions& options) {
  ASSIGN_OR_RETURN(VerticalDataset dataset, ResolveDataset(options));
  ASSIGN_OR_RETURN(TrainingResult result,
                   RunTraining(dataset, options.training));
  const std::string metrics = FormatMetrics(result, options.training, dataset);
  if (options.out_path.empty()) {
    std::cout << metrics;
  } else {
    RETURN_IF_ERROR(WriteFile(options.out_path, metrics));
  }
  if (!options.message_log_path.empty()) {
    RETURN_IF_ERROR(WriteFile(options.message_log_path, result.message_log));
  }
  return absl::OkStatus();
}

bool VerifyReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string VerifyReport::ToString() const {
  std::string out;
  for (const CheckResult& c : checks) {
    absl::StrAppend(&out, c.passed ? "PASS " : "FAIL ", c.name, ": ", c.detail,
                    "\n");
  }
  absl::StrAppend(&out, passed() ? "verify: all checks passed\n"
                                 : "verify: FAILED\n");
  return out;
}

absl::StatusOr<VerifyReport> CmdVerify(const RunOptions& options) {
  ASSIGN_OR_RETURN(VerticalDataset dataset, ResolveDataset(options));
  VerifyReport report;
  report.checks.push_back(CheckFunctionVectors(options.training.seed, 100));

  TrainingConfig config = options.training;
  config.iterations = std::max<size_t>(config.iterations, 2);
  config.protocol.retain_transcripts = true;
  auto result = RunTraining(dataset, config);
  if (!result.ok()) {
    report.checks.push_back(
        {"protocol_run", false, DescribeStatus(result.status())});
    return report;
  }
  report.checks.push_back(
      {"protocol_run", true,
       absl::StrCat(result->history.size(), " iterations completed")});
  report.checks.push_back(
      CheckGradientOracle(*result, config.protocol.exact_mode));
  report.checks.push_back(CheckFiniteDifferences(
      dataset, config, result->final_state.weights.Flatten()));
  report.checks.push_back(CheckCounts(*result, dataset));
  report.checks.push_back(CheckOneWayFlow(result->message_log));
  const ProbeReport probe = ProbeMixAndMatch(result->transcripts);
  report.checks.push_back({"mix_and_match", probe.passed(), probe.ToString()});
  return report;
}

absl::Status CmdSynth(const SyntheticOptions& options,
                      const std::string& csv_path,
                      const std::string& partition_path) {
  ASSIGN_OR_RETURN(SyntheticData data, GenerateSynthetic(options));
  RETURN_IF_ERROR(WriteFile(csv_path, DatasetToCsv(data.dataset)));
  return WriteFile(partition_path,
                   PartitionSpecToJson(PartitionOf(data.dataset)));
}

namespace {

struct CommonFlags {
  RunOptions run;
  std::string model = "linear";
  std::string clients = "2,2,2";
  CLI::Option* data_bits = nullptr;
};

absl::StatusOr<std::vector<size_t>> ParseCounts(const std::string& text) {
  std::vector<size_t> counts;
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    size_t v = 0;
    if (!absl::SimpleAtoi(part, &v) || v == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad feature count list '", text, "'"));
    }
    counts.push_back(v);
  }
  return counts;
}

void AddRunFlags(CLI::App* cmd, CommonFlags& f) {
  RunOptions& r = f.run;
  TrainingConfig& t = r.training;
  cmd->add_option("--dataset", r.dataset_path, "CSV file with a header row");
  cmd->add_option("--partition", r.partition_path, "JSON partition spec");
  cmd->add_flag("--synthetic", r.synthetic, "Generate a seeded dataset instead");
  cmd->add_option("--rows", r.synthetic_options.rows, "Synthetic row count");
  cmd->add_option("--clients", f.clients,
                  "Synthetic per-client feature counts, e.g. 2,2,2");
  cmd->add_option("--model", f.model, "linear | logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  cmd->add_option("--iters", t.iterations, "Training iterations T");
  cmd->add_option("--batch-size", t.batch_size, "Batch size S");
  cmd->add_option("--lr", t.learning_rate, "Learning rate");
  cmd->add_option("--lambda", t.reg_lambda, "L2 regularization weight");
  cmd->add_option("--seed", t.seed, "Seed for batching and synthetic data");
  f.data_bits = cmd->add_option("--data-bits", t.protocol.fixed_point.data_bits,
                                "Fractional bits for features and labels");
  cmd->add_option("--weight-bits", t.protocol.fixed_point.weight_bits,
                  "Fractional bits for weights");
  cmd->add_flag("--exact", t.protocol.exact_mode,
                "Exact mode: integer-exact encoding, no rounding");
  cmd->add_flag("--tagged", t.protocol.tagged_mode,
                "Tag ciphertexts and keys with the iteration index");
  cmd->add_option("--out", r.out_path, "Metrics output (default stdout)");
}

absl::Status Finalize(CommonFlags& f) {
  ASSIGN_OR_RETURN(f.run.training.kind, ParseModelKind(f.model));
  ASSIGN_OR_RETURN(f.run.synthetic_options.feature_counts,
                   ParseCounts(f.clients));
  f.run.synthetic_options.seed = f.run.training.seed;
  f.run.synthetic_options.kind = f.run.training.kind;
  if (f.run.training.protocol.exact_mode) {
    f.run.synthetic_options.integer_valued = true;
    if (f.data_bits->count() == 0) {
      // y - 1/2 needs one fractional bit.
      f.run.training.protocol.fixed_point.data_bits =
          f.run.training.kind == ModelKind::kLogisticTaylor ? 1 : 0;
    }
  }
  return absl::OkStatus();
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"Secure vertical federated gradient descent simulator"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Run the training protocol");
  AddRunFlags(train, train_flags);
  train->add_option("--message-log", train_flags.run.message_log_path,
                    "Write the transport audit log (JSON lines)");

  CommonFlags verify_flags;
  verify_flags.run.training.iterations = 5;
  CLI::App* verify = app.add_subcommand("verify", "Run the verification suite");
  AddRunFlags(verify, verify_flags);
  verify->add_flag("--debug-reuse-instance",
                   verify_flags.run.training.protocol.reuse_instance,
                   "Reuse one FE instance across iterations (negative control)");
  size_t tag_fault_client = 0;
  CLI::Option* tag_fault = verify->add_option(
      "--inject-tag-mismatch", tag_fault_client,
      "Make this client encrypt under a wrong tag");

  SyntheticOptions synth_options;
  std::string synth_model = "linear";
  std::string synth_clients = "2,2,2";
  std::string synth_csv = "synthetic.csv";
  std::string synth_partition = "partition.json";
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--model", synth_model, "linear | logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  synth->add_option("--rows", synth_options.rows, "Row count");
  synth->add_option("--clients", synth_clients, "Per-client feature counts");
  synth->add_option("--label-client", synth_options.label_client,
                    "Index of the label holder");
  synth->add_flag("--integer", synth_options.integer_valued,
                  "Integer features and labels (exact-mode friendly)");
  synth->add_option("--noise", synth_options.noise, "Label noise");
  synth->add_option("--seed", synth_options.seed, "Generator seed");
  synth->add_option("--out", synth_csv, "CSV output path");
  synth->add_option("--partition-out", synth_partition,
                    "Partition spec output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto fail = [](const absl::Status& status) {
    std::cerr << "error: " << DescribeStatus(status) << "\n";
    return 1;
  };

  if (train->parsed()) {
    if (auto s = Finalize(train_flags); !s.ok()) return fail(s);
    if (auto s = CmdTrain(train_flags.run); !s.ok()) return fail(s);
    return 0;
  }
  if (verify->parsed()) {
    if (auto s = Finalize(verify_flags); !s.ok()) return fail(s);
    if (tag_fault->count() > 0) {
      verify_flags.run.training.protocol.tag_fault_client = tag_fault_client;
    }
    auto report = CmdVerify(verify_flags.run);
    if (!report.ok()) return fail(report.status());
    std::cout << report->ToString();
    return report->passed() ? 0 : 2;
  }
  if (synth->parsed()) {
    auto kind = ParseModelKind(synth_model);
    if (!kind.ok()) return fail(kind.status());
    synth_options.kind = *kind;
    auto counts = ParseCounts(synth_clients);
    if (!counts.ok()) return fail(counts.status());
    synth_options.feature_counts = *counts;
    if (auto s = CmdSynth(synth_options, synth_csv, synth_partition); !s.ok()) {
      return fail(s);
    }
    return 0;
  }
  return 1;
}

}  // namespace sfedv::cli
