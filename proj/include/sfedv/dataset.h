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

#ifndef SFEDV_DATASET_H_
#define SFEDV_DATASET_H_

#include <cstdint>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "sfedv/protocol.h"
#include "sfedv/training.h"

namespace sfedv {

// Which client owns which CSV columns. Stored as JSON:
//
//   {"clients": [{"name": "bank", "features": ["age", "income"]},
//                {"name": "shop", "features": ["visits"]}],
//    "label": {"client": "bank", "column": "default"}}
struct PartitionSpec {
  struct Client {
    std::string name;
    std::vector<std::string> feature_columns;
  };
  std::vector<Client> clients;
  std::string label_client;
  std::string label_column;
};

absl::StatusOr<PartitionSpec> ParsePartitionSpec(absl::string_view json_text);
std::string PartitionSpecToJson(const PartitionSpec& spec);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Header row followed by decimal numerals. Errors name the 1-based line and
// the column.
absl::StatusOr<CsvTable> ParseCsv(absl::string_view text);

// Fails on unknown, duplicated or unassigned columns and on a label owner that
// is not a listed client.
absl::StatusOr<VerticalDataset> PartitionTable(const CsvTable& table,
                                               const PartitionSpec& spec);

absl::StatusOr<VerticalDataset> LoadAndPartition(const std::string& csv_path,
                                                 const std::string& spec_path);

std::string DatasetToCsv(const VerticalDataset& dataset);
PartitionSpec PartitionOf(const VerticalDataset& dataset);

struct SyntheticOptions {
  ModelKind kind = ModelKind::kLinear;
  size_t rows = 64;
  std::vector<size_t> feature_counts = {2, 2, 2};
  size_t label_client = 0;
  // Features in {-2..2}, weights on a 1/4 grid and integer labels, so exact
  // mode can consume the data unchanged.
  bool integer_valued = false;
  // Label noise: standard deviation for real data, +-1 flips with this
  // probability for integer data. Ignored for logistic labels.
  double noise = 0.1;
  uint64_t seed = 1;
};

struct SyntheticData {
  VerticalDataset dataset;
  std::vector<double> true_weights;
};

absl::StatusOr<SyntheticData> GenerateSynthetic(const SyntheticOptions& options);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace sfedv

#endif  // SFEDV_DATASET_H_
