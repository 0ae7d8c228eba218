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

#include "sfedv/baseline.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "sfedv/status_macros.h"

namespace sfedv {
namespace {

absl::Status CheckShapes(const RealMatrix& x, std::span<const double> y,
                         std::span<const double> w) {
  if (x.empty()) return absl::InvalidArgumentError("empty feature matrix");
  if (y.size() != x.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "label length ", y.size(), " does not match ", x.rows(), " rows"));
  }
  if (w.size() != x.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "weight length ", w.size(), " does not match ", x.cols(), " columns"));
  }
  return absl::OkStatus();
}

std::vector<double> Predict(const RealMatrix& x, std::span<const double> w) {
  std::vector<double> z(x.rows(), 0.0);
  for (size_t s = 0; s < x.rows(); ++s) {
    for (size_t f = 0; f < x.cols(); ++f) z[s] += x(s, f) * w[f];
  }
  return z;
}

// scale * (v^T X) + lambda * w.
std::vector<double> ProjectAndScale(const RealMatrix& x,
                                    std::span<const double> v, double scale,
                                    std::span<const double> w, double lambda) {
  std::vector<double> g(x.cols(), 0.0);
  for (size_t f = 0; f < x.cols(); ++f) {
    double r = 0.0;
    for (size_t s = 0; s < x.rows(); ++s) r += v[s] * x(s, f);
    g[f] = scale * r + lambda * w[f];
  }
  return g;
}

}  // namespace

absl::StatusOr<std::vector<double>> CentralizedGradientLinear(
    const RealMatrix& x, std::span<const double> y, std::span<const double> w,
    double lambda) {
  RETURN_IF_ERROR(CheckShapes(x, y, w));
  std::vector<double> u = Predict(x, w);
  for (size_t s = 0; s < u.size(); ++s) u[s] = y[s] - u[s];
  const double scale = -2.0 / static_cast<double>(x.rows());
  return ProjectAndScale(x, u, scale, w, lambda);
}

absl::StatusOr<std::vector<double>> CentralizedGradientLogisticTaylor(
    const RealMatrix& x, std::span<const double> y, std::span<const double> w,
    double lambda) {
  RETURN_IF_ERROR(CheckShapes(x, y, w));
  std::vector<double> v = Predict(x, w);
  for (size_t s = 0; s < v.size(); ++s) v[s] = 0.25 * v[s] - y[s] + 0.5;
  const double scale = 1.0 / static_cast<double>(x.rows());
  return ProjectAndScale(x, v, scale, w, lambda);
}

absl::StatusOr<double> MseLoss(const RealMatrix& x, std::span<const double> y,
                               std::span<const double> w) {
  RETURN_IF_ERROR(CheckShapes(x, y, w));
  const std::vector<double> z = Predict(x, w);
  double sum = 0.0;
  for (size_t s = 0; s < z.size(); ++s) sum += (y[s] - z[s]) * (y[s] - z[s]);
  return sum / static_cast<double>(x.rows());
}

absl::StatusOr<double> TaylorLoss(const RealMatrix& x, std::span<const double> y,
                                  std::span<const double> w) {
  RETURN_IF_ERROR(CheckShapes(x, y, w));
  const std::vector<double> z = Predict(x, w);
  double sum = 0.0;
  for (size_t s = 0; s < z.size(); ++s) {
    sum += std::numbers::ln2 + z[s] * z[s] / 8.0 + z[s] * (0.5 - y[s]);
  }
  return sum / static_cast<double>(x.rows());
}

std::vector<double> FiniteDifferenceGradient(const LossFunction& loss,
                                             std::span<const double> w,
                                             double h) {
  std::vector<double> point(w.begin(), w.end());
  std::vector<double> grad(w.size(), 0.0);
  for (size_t f = 0; f < w.size(); ++f) {
    point[f] = w[f] + h;
    const double up = loss(point);
    point[f] = w[f] - h;
    const double down = loss(point);
    point[f] = w[f];
    grad[f] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace sfedv
