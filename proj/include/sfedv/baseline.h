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

#ifndef SFEDV_BASELINE_H_
#define SFEDV_BASELINE_H_

// Centralized plaintext reference computations. Every gradient the protocol
// produces is checked against these.

#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "sfedv/tensor.h"

namespace sfedv {

// All clients' columns side by side, in partition order.
struct CentralDataset {
  RealMatrix features;
  std::vector<double> labels;
};

// -(2/S) (y - Xw)^T X + lambda w.
absl::StatusOr<std::vector<double>> CentralizedGradientLinear(
    const RealMatrix& x, std::span<const double> y, std::span<const double> w,
    double lambda);

// (1/S) (Xw/4 - y + 1/2)^T X + lambda w, the exact gradient of TaylorLoss.
absl::StatusOr<std::vector<double>> CentralizedGradientLogisticTaylor(
    const RealMatrix& x, std::span<const double> y, std::span<const double> w,
    double lambda);

// (1/S) ||y - Xw||^2.
absl::StatusOr<double> MseLoss(const RealMatrix& x, std::span<const double> y,
                               std::span<const double> w);

// Degree-2 Taylor surrogate of the logistic cross-entropy,
// (1/S) sum_s [log 2 + z_s^2 / 8 + z_s (1/2 - y_s)] with z = Xw.
absl::StatusOr<double> TaylorLoss(const RealMatrix& x, std::span<const double> y,
                                  std::span<const double> w);

using LossFunction = std::function<double(std::span<const double>)>;

// Central differences (loss(w + h e_f) - loss(w - h e_f)) / 2h.
std::vector<double> FiniteDifferenceGradient(const LossFunction& loss,
                                             std::span<const double> w,
                                             double h = 1e-4);

}  // namespace sfedv

#endif  // SFEDV_BASELINE_H_
