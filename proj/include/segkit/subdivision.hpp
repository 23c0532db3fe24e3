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

#ifndef SEGKIT_SUBDIVISION_HPP_
#define SEGKIT_SUBDIVISION_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "segkit/feature_grid.hpp"
#include "segkit/mask.hpp"
#include "segkit/point_head.hpp"

namespace segkit {

struct SubdivisionConfig {
  int coarse_size = 7;
  int steps = 2;  // 7 -> 14 -> 28
  int points_per_step = 196;
  double threshold = 0.5;

  // Side length after all steps: coarse_size * 2^steps.
  int output_size() const { return coarse_size << steps; }
  void validate() const;
};

// Row-major indices of the min(n, cells) cells with the smallest |p - 0.5|,
// most uncertain first. Equal uncertainty keeps row-major order.
std::vector<std::size_t> uncertain_cells(const ProbabilityMask& prob, int n);

// uncertain_cells mapped to normalized coordinates.
PointSet uncertain_points(const ProbabilityMask& prob, int n);

// Predicts a foreground probability for one point from its sampled feature
// vector and the current map's value there.
using PointPredictor = std::function<double(std::span<const double>, double)>;

// Repeats `steps` times: upsample the map x2, pick points_per_step uncertain
// cells, and overwrite them with the predictor's output. Throws
// DimensionError unless coarse is coarse_size x coarse_size.
ProbabilityMask subdivision_refine(const PointPredictor& predictor,
                                   const ProbabilityMask& coarse,
                                   const FeatureGrid& fine_features,
                                   const SubdivisionConfig& cfg);
ProbabilityMask subdivision_refine(const PointHeadModel& model,
                                   const ProbabilityMask& coarse,
                                   const FeatureGrid& fine_features,
                                   const SubdivisionConfig& cfg);

// The same x2 upsampling chain with no point re-prediction.
ProbabilityMask bilinear_chain(const ProbabilityMask& coarse, int steps);

}  // namespace segkit

#endif  // SEGKIT_SUBDIVISION_HPP_
