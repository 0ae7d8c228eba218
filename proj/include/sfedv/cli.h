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

#ifndef SFEDV_CLI_H_
#define SFEDV_CLI_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sfedv/dataset.h"
#include "sfedv/training.h"

namespace sfedv::cli {

struct RunOptions {
  // Either a CSV + partition pair or a generated dataset.
  std::string dataset_path;
  std::string partition_path;
  bool synthetic = false;
  SyntheticOptions synthetic_options;

  TrainingConfig training;

  // Metrics destination; empty means stdout.
  std::string out_path;
  std::string message_log_path;
};

absl::StatusOr<VerticalDataset> ResolveDataset(const RunOptions& options);

// Line-delimited JSON: one "iteration" record per iteration followed by one
// "summary" record. See README for the field list.
std::string FormatMetrics(const TrainingResult& result,
                          const TrainingConfig& config,
                          const VerticalDataset& dataset);

absl::Status CmdTrain(const RunOptions& options);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string ToString() const;
};

// Function-vector oracle equality, the gradient oracle triangle, per-iteration
// counts, one-way client flow and the mix-and-match probe. Errors are only
// returned for unusable inputs; failed checks land in the report.
absl::StatusOr<VerifyReport> CmdVerify(const RunOptions& options);

absl::Status CmdSynth(const SyntheticOptions& options,
                      const std::string& csv_path,
                      const std::string& partition_path);

// Parses argv and dispatches; returns the process exit code.
int RunCli(int argc, char** argv);

}  // namespace sfedv::cli

#endif  // SFEDV_CLI_H_
