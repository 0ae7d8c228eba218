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
#include "sfedv/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"
#include "json.hpp"
#include "sfedv/status_macros.h"

namespace sfedv {

using json = nlohmann::json;

absl::StatusOr<PartitionSpec> ParsePartitionSpec(absl::string_view json_text) {
  json j = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("partition spec is not a JSON object");
  }
  PartitionSpec spec;
  if (!j.contains("clients") || !j["clients"].is_array() ||
      j["clients"].empty()) {
    return absl::InvalidArgumentError(
        "partition spec needs a non-empty \"clients\" array");
  }
  for (const json& c : j["clients"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string() ||
        !c.contains("features") || !c["features"].is_array()) {
      return absl::InvalidArgumentError(
          "each client needs a string \"name\" and a \"features\" array");
    }
    PartitionSpec::Client client{c["name"].get<std::string>(), {}};
    for (const json& f : c["features"]) {
      if (!f.is_string()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "client '", client.name, "' has a non-string feature column"));
      }
      client.feature_columns.push_back(f.get<std::string>());
    }
    spec.clients.push_back(std::move(client));
  }
  const json& label = j.value("label", json());
  if (!label.is_object() || !label.contains("client") ||
      !label["client"].is_string() || !label.contains("column") ||
      !label["column"].is_string()) {
    return absl::InvalidArgumentError(
        "partition spec needs \"label\": {\"client\", \"column\"}");
  }
  spec.label_client = label["client"].get<std::string>();
  spec.label_column = label["column"].get<std::string>();
  return spec;
}

std::string PartitionSpecToJson(const PartitionSpec& spec) {
  nlohmann::ordered_json j;
  j["clients"] = nlohmann::ordered_json::array();
  for (const auto& c : spec.clients) {
    nlohmann::ordered_json entry;
    entry["name"] = c.name;
    entry["features"] = c.feature_columns;
    j["clients"].push_back(entry);
  }
  j["label"]["client"] = spec.label_client;
  j["label"]["column"] = spec.label_column;
  return j.dump(2) + "\n";
}

absl::StatusOr<CsvTable> ParseCsv(absl::string_view text) {
  CsvTable table;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripTrailingAsciiWhitespace(line);
    if (line.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (table.header.empty()) {
      std::set<std::string> seen;
      for (absl::string_view cell : cells) {
        std::string name(absl::StripAsciiWhitespace(cell));
        if (name.empty() || !seen.insert(name).second) {
          return absl::InvalidArgumentError(absl::StrCat(
              "line ", line_no, ": empty or duplicate column name '", name,
              "'"));
        }
        table.header.push_back(std::move(name));
      }
      continue;
    }
    if (cells.size() != table.header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected ", table.header.size(),
                       " cells, got ", cells.size()));
    }
    std::vector<double> row;
    for (size_t c = 0; c < cells.size(); ++c) {
      absl::string_view cell = absl::StripAsciiWhitespace(cells[c]);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() ||
          ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ", column ", c + 1, " ('",
                         table.header[c], "'): not a number: '", cells[c],
                         "'"));
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) return absl::InvalidArgumentError("empty CSV");
  if (table.rows.empty()) return absl::InvalidArgumentError("CSV has no rows");
  return table;
}

absl::StatusOr<VerticalDataset> PartitionTable(const CsvTable& table,
                                               const PartitionSpec& spec) {
  std::map<std::string, size_t> column_index;
  for (size_t c = 0; c < table.header.size(); ++c) {
    column_index[table.header[c]] = c;
  }
  auto find = [&](const std::string& name) -> absl::StatusOr<size_t> {
    auto it = column_index.find(name);
    if (it == column_index.end()) {
      return absl::NotFoundError(
          absl::StrCat("column '", name, "' is not in the CSV header"));
    }
    return it->second;
  };

  VerticalDataset dataset;
  dataset.label_name = spec.label_column;
  ASSIGN_OR_RETURN(const size_t label_col, find(spec.label_column));
  std::map<std::string, std::string> owner{{spec.label_column, "<label>"}};
  bool label_owner_found = false;
  std::set<std::string> client_names;
  for (size_t k = 0; k < spec.clients.size(); ++k) {
    const auto& client = spec.clients[k];
    if (!client_names.insert(client.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("client '", client.name, "' listed twice"));
    }
    if (client.feature_columns.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client '", client.name, "' has no feature columns"));
    }
    std::vector<size_t> cols;
    for (const std::string& name : client.feature_columns) {
      ASSIGN_OR_RETURN(size_t col, find(name));
      auto [it, inserted] = owner.emplace(name, client.name);
      if (!inserted) {
        return absl::InvalidArgumentError(
            absl::StrCat("column '", name, "' assigned to client '",
                         client.name, "' is already owned by '", it->second,
                         "'"));
      }
      cols.push_back(col);
    }
    RealMatrix m(table.rows.size(), cols.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
      for (size_t f = 0; f < cols.size(); ++f) m(r, f) = table.rows[r][cols[f]];
    }
    dataset.client_names.push_back(client.name);
    dataset.feature_names.push_back(client.feature_columns);
    dataset.client_features.push_back(std::move(m));
    if (client.name == spec.label_client) {
      dataset.label_client = k;
      label_owner_found = true;
    }
  }
  if (!label_owner_found) {
    return absl::InvalidArgumentError(absl::StrCat(
        "label owner '", spec.label_client, "' is not a listed client"));
  }
  for (const std::string& name : table.header) {
    if (!owner.contains(name)) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", name, "' is not assigned to any client"));
    }
  }
  for (const auto& row : table.rows) dataset.labels.push_back(row[label_col]);
  return dataset;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<VerticalDataset> LoadAndPartition(const std::string& csv_path,
                                                 const std::string& spec_path) {
  ASSIGN_OR_RETURN(std::string csv_text, ReadFile(csv_path));
  ASSIGN_OR_RETURN(std::string spec_text, ReadFile(spec_path));
  ASSIGN_OR_RETURN(CsvTable table, ParseCsv(csv_text));
  ASSIGN_OR_RETURN(PartitionSpec spec, ParsePartitionSpec(spec_text));
  return PartitionTable(table, spec);
}

PartitionSpec PartitionOf(const VerticalDataset& dataset) {
  PartitionSpec spec;
  for (size_t k = 0; k < dataset.client_names.size(); ++k) {
    spec.clients.push_back({dataset.client_names[k], dataset.feature_names[k]});
  }
  spec.label_client = dataset.client_names[dataset.label_client];
  spec.label_column = dataset.label_name;
  return spec;
}

std::string DatasetToCsv(const VerticalDataset& dataset) {
  std::vector<std::string> header;
  for (const auto& names : dataset.feature_names) {
    header.insert(header.end(), names.begin(), names.end());
  }
  header.push_back(dataset.label_name);
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (size_t r = 0; r < dataset.rows(); ++r) {
    std::vector<std::string> cells;
    for (const RealMatrix& m : dataset.client_features) {
      for (size_t f = 0; f < m.cols(); ++f) {
        cells.push_back(absl::StrFormat("%.17g", m(r, f)));
      }
    }
    cells.push_back(absl::StrFormat("%.17g", dataset.labels[r]));
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
  }
  return out;
}

absl::StatusOr<SyntheticData> GenerateSynthetic(const SyntheticOptions& options) {
  if (options.rows == 0 || options.feature_counts.empty()) {
    return absl::InvalidArgumentError("synthetic data needs rows and clients");
  }
  if (options.label_client >= options.feature_counts.size()) {
    return absl::InvalidArgumentError("label client out of range");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> small_int(-2, 2);
  std::uniform_int_distribution<int> quarter(-4, 4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticData data;
  VerticalDataset& ds = data.dataset;
  ds.label_client = options.label_client;
  ds.label_name = "label";
  for (size_t k = 0; k < options.feature_counts.size(); ++k) {
    const size_t fk = options.feature_counts[k];
    if (fk == 0) return absl::InvalidArgumentError("client without features");
    ds.client_names.push_back(absl::StrCat("client", k));
    std::vector<std::string> names;
    for (size_t f = 0; f < fk; ++f) names.push_back(absl::StrCat("c", k, "_f", f));
    ds.feature_names.push_back(std::move(names));
    RealMatrix m(options.rows, fk);
    for (size_t r = 0; r < options.rows; ++r) {
      for (size_t f = 0; f < fk; ++f) {
        m(r, f) = options.integer_valued ? small_int(rng) : unit(rng);
      }
    }
    ds.client_features.push_back(std::move(m));
    for (size_t f = 0; f < fk; ++f) {
      data.true_weights.push_back(options.integer_valued ? quarter(rng) / 4.0
                                                         : unit(rng));
    }
  }
  const CentralDataset central = ds.Central();
  for (size_t r = 0; r < options.rows; ++r) {
    double z = 0.0;
    for (size_t f = 0; f < central.features.cols(); ++f) {
      z += central.features(r, f) * data.true_weights[f];
    }
    double y;
    if (options.kind == ModelKind::kLogisticTaylor) {
      y = coin(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
    } else if (options.integer_valued) {
      y = std::round(z);
      if (coin(rng) < options.noise) y += coin(rng) < 0.5 ? -1.0 : 1.0;
    } else {
      y = z + options.noise * gauss(rng);
    }
    ds.labels.push_back(y);
  }
  return data;
}

}  // namespace sfedv
