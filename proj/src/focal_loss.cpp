/* Copyright 2026 The segkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "segkit/focal_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "segkit/error.hpp"

namespace segkit {
namespace {

double focal_of_pt(double pt, double alpha, double gamma) {
  return -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
}

}  // namespace

double FocalLossParams::alpha_for(std::size_t cls) const {
  if (alpha.size() == 1) return alpha.front();
  if (cls >= alpha.size()) {
    throw std::invalid_argument("no alpha weight for class " + std::to_string(cls));
  }
  return alpha[cls];
}

void FocalLossParams::validate() const {
  if (alpha.empty()) throw std::invalid_argument("alpha must not be empty");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alpha weights must be positive");
    }
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be non-negative");
  }
}

double focal_binary(double p, int target, const FocalLossParams& params) {
  const double pc = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
  const double pt = target == 1 ? pc : 1.0 - pc;
  return focal_of_pt(pt, params.alpha_for(target == 1 ? 1 : 0), params.gamma);
}

double focal_binary_grad(double p, int target, const FocalLossParams& params) {
  if (p < kProbEpsilon || p > 1.0 - kProbEpsilon) return 0.0;
  const double alpha = params.alpha_for(target == 1 ? 1 : 0);
  const double gamma = params.gamma;
  const double pt = target == 1 ? p : 1.0 - p;
  const double q = 1.0 - pt;
  // dL/dp_t = alpha * [gamma * q^(gamma-1) * ln(p_t) - q^gamma / p_t]
  double d_pt = -alpha * std::pow(q, gamma) / pt;
  if (gamma != 0.0) d_pt += alpha * gamma * std::pow(q, gamma - 1.0) * std::log(pt);
  return target == 1 ? d_pt : -d_pt;
}

double focal_multiclass(std::span<const double> probs, std::size_t target,
                        const FocalLossParams& params) {
  if (probs.size() < 2) throw std::invalid_argument("need at least two classes");
  if (target >= probs.size()) {
    throw std::invalid_argument("target class " + std::to_string(target) +
                                " out of range");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("class probabilities do not sum to 1");
  }
  const double pt = std::clamp(probs[target], kProbEpsilon, 1.0 - kProbEpsilon);
  return focal_of_pt(pt, params.alpha_for(target), params.gamma);
}

double focal_mask(const ProbabilityMask& pred, const BinaryMask& gt,
                  const FocalLossParams& params) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DimensionError("focal_mask: prediction and ground truth differ in shape");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += focal_binary(pred[i], gt[i] ? 1 : 0, params);
  }
  return total / static_cast<double>(pred.size());
}

double composite_loss(double l_cls, double l_box, double l_mask, double l_point,
                      const CompositeLossWeights& w) {
  return w.cls * l_cls + w.box * l_box + w.mask * l_mask + w.point * l_point;
}

}  // namespace segkit
