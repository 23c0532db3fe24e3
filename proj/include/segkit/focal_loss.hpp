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

#ifndef SEGKIT_FOCAL_LOSS_HPP_
#define SEGKIT_FOCAL_LOSS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "segkit/mask.hpp"

namespace segkit {

// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before the log.
inline constexpr double kProbEpsilon = 1e-7;

// FL(p_t) = -alpha_t * (1 - p_t)^gamma * ln(p_t).
//
// `alpha` holds one weight per class. A single entry applies to every class;
// binary losses index it by target (0 = background, 1 = foreground).
struct FocalLossParams {
  std::vector<double> alpha{1.0};
  double gamma = 2.0;

  double alpha_for(std::size_t cls) const;
  // Throws std::invalid_argument unless every alpha > 0 and gamma >= 0.
  void validate() const;
};

struct CompositeLossWeights {
  double cls = 1.0;
  double box = 1.0;
  double mask = 1.1;
  double point = 1.0;
};

double focal_binary(double p, int target, const FocalLossParams& params);

// d focal_binary / dp. Zero where the clamp is active.
double focal_binary_grad(double p, int target, const FocalLossParams& params);

// Focal loss on a class-probability simplex; throws std::invalid_argument if
// probs does not sum to 1 within 1e-6, has fewer than two classes, or target
// is out of range.
double focal_multiclass(std::span<const double> probs, std::size_t target,
                        const FocalLossParams& params);

// Mean per-pixel focal_binary.
double focal_mask(const ProbabilityMask& pred, const BinaryMask& gt,
                  const FocalLossParams& params);

double composite_loss(double l_cls, double l_box, double l_mask, double l_point,
                      const CompositeLossWeights& weights = {});

}  // namespace segkit

#endif  // SEGKIT_FOCAL_LOSS_HPP_
