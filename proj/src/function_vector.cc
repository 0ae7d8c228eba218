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

#include "sfedv/function_vector.h"

#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "sfedv/status_macros.h"

namespace sfedv {

size_t Layout::GlobalFeatureIndex(size_t client, size_t feature) const {
  return std::accumulate(feature_counts.begin(),
                         feature_counts.begin() + client, size_t{0}) +
         feature;
}

std::vector<size_t> Layout::SlotLengths() const {
  std::vector<size_t> lengths;
  lengths.reserve(num_slots());
  for (size_t f : feature_counts) lengths.push_back(batch_size * f);
  lengths.push_back(batch_size);
  return lengths;
}

absl::StatusOr<Layout> BuildLayout(size_t num_clients, size_t batch_size,
                                   std::vector<size_t> feature_counts) {
  if (num_clients == 0 || batch_size == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("layout needs N >= 1 and S >= 1, got N=", num_clients,
                     " S=", batch_size));
  }
  if (feature_counts.size() != num_clients) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", num_clients, " feature counts, got ",
                     feature_counts.size()));
  }
  Layout layout;
  layout.num_clients = num_clients;
  layout.batch_size = batch_size;
  size_t offset = 0;
  for (size_t i = 0; i < num_clients; ++i) {
    if (feature_counts[i] == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", i, " has no features"));
    }
    layout.offsets.push_back(offset);
    offset += batch_size * feature_counts[i];
    layout.total_features += feature_counts[i];
  }
  layout.feature_counts = std::move(feature_counts);
  layout.label_offset = offset;
  layout.length = offset + batch_size;
  return layout;
}

WeightVector WeightVector::Zeros(std::span<const size_t> feature_counts) {
  std::vector<std::vector<double>> segments;
  for (size_t f : feature_counts) segments.emplace_back(f, 0.0);
  return WeightVector(std::move(segments));
}

absl::StatusOr<WeightVector> WeightVector::FromFlat(
    std::span<const double> flat, std::span<const size_t> feature_counts) {
  const size_t total =
      std::accumulate(feature_counts.begin(), feature_counts.end(), size_t{0});
  if (flat.size() != total) {
    return absl::InvalidArgumentError(absl::StrCat(
        "weight length ", flat.size(), " does not match F=", total));
  }
  std::vector<std::vector<double>> segments;
  size_t pos = 0;
  for (size_t f : feature_counts) {
    segments.emplace_back(flat.begin() + pos, flat.begin() + pos + f);
    pos += f;
  }
  return WeightVector(std::move(segments));
}

size_t WeightVector::size() const {
  size_t n = 0;
  for (const auto& s : segments_) n += s.size();
  return n;
}

std::vector<double> WeightVector::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& s : segments_) flat.insert(flat.end(), s.begin(), s.end());
  return flat;
}

bool WeightVector::Matches(std::span<const size_t> feature_counts) const {
  if (segments_.size() != feature_counts.size()) return false;
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].size() != feature_counts[i]) return false;
  }
  return true;
}

absl::StatusOr<QuantizedWeights> QuantizeWeights(const WeightVector& w,
                                                 int weight_bits,
                                                 RoundingPolicy policy) {
  QuantizedWeights out;
  out.reserve(w.num_segments());
  for (const auto& segment : w.segments()) {
    ASSIGN_OR_RETURN(auto q, QuantizeVector(segment, weight_bits, policy));
    out.push_back(std::move(q));
  }
  return out;
}

absl::StatusOr<std::vector<SparseEntry>> SubcGen(const QuantizedWeights& w,
                                                 int64_t unit,
                                                 const Layout& layout) {
  if (w.size() != layout.num_clients) {
    return absl::InvalidArgumentError(
        absl::StrCat("weights have ", w.size(), " segments, layout has ",
                     layout.num_clients, " clients"));
  }
  for (size_t j = 0; j < w.size(); ++j) {
    if (w[j].size() != layout.feature_counts[j]) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight segment ", j, " has length ", w[j].size(),
                       ", expected ", layout.feature_counts[j]));
    }
  }
  const uint64_t S = layout.batch_size;
  const uint64_t L = layout.length;
  std::vector<SparseEntry> entries;
  entries.reserve(S * (layout.total_features + 1));
  for (uint64_t s = 0; s < S; ++s) {
    const uint64_t row_base = s * L;
    for (size_t j = 0; j < layout.num_clients; ++j) {
      for (size_t f = 0; f < w[j].size(); ++f) {
        if (w[j][f] == 0) continue;
        entries.push_back({row_base + layout.offsets[j] + f * S + s, -w[j][f]});
      }
    }
    if (unit != 0) entries.push_back({row_base + layout.label_offset + s, unit});
  }
  return entries;
}

absl::StatusOr<SparseFunctionVector> CGen(const QuantizedWeights& w,
                                          int64_t unit, const Layout& layout,
                                          size_t client, size_t feature) {
  if (client >= layout.num_clients ||
      feature >= layout.feature_counts[client]) {
    return absl::OutOfRangeError(absl::StrCat(
        "no feature (", client, ", ", feature, ") in layout"));
  }
  ASSIGN_OR_RETURN(std::vector<SparseEntry> entries, SubcGen(w, unit, layout));
  // Relative index s*L + col sits at global row off_i + p*S + s, so shifting
  // by the block's first row lands every entry in place.
  const uint64_t base =
      static_cast<uint64_t>(layout.offsets[client] + feature * layout.batch_size) *
      layout.length;
  for (SparseEntry& e : entries) e.index += base;
  return SparseFunctionVector::Create(layout.dimension(), std::move(entries));
}

absl::StatusOr<std::vector<SparseFunctionVector>> CGenAll(
    const QuantizedWeights& w, int64_t unit, const Layout& layout) {
  std::vector<SparseFunctionVector> out;
  out.reserve(layout.total_features);
  for (size_t i = 0; i < layout.num_clients; ++i) {
    for (size_t p = 0; p < layout.feature_counts[i]; ++p) {
      ASSIGN_OR_RETURN(auto c, CGen(w, unit, layout, i, p));
      out.push_back(std::move(c));
    }
  }
  return out;
}

LogisticInputs LogisticAdjust(const WeightVector& w,
                              std::span<const double> labels) {
  std::vector<std::vector<double>> segments = w.segments();
  for (auto& segment : segments) {
    for (double& v : segment) v *= 0.25;
  }
  std::vector<double> shifted(labels.begin(), labels.end());
  for (double& y : shifted) y -= 0.5;
  return {WeightVector(std::move(segments)), std::move(shifted)};
}

}  // namespace sfedv
