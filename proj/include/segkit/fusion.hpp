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

#ifndef SEGKIT_FUSION_HPP_
#define SEGKIT_FUSION_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segkit/mask.hpp"
#include "segkit/prediction.hpp"

namespace segkit {

struct TtaTransform {
  enum class Kind { kHorizontalFlip, kRescale };

  Kind kind = Kind::kRescale;
  double scale = 1.0;  // kRescale only

  static TtaTransform horizontal_flip() { return {Kind::kHorizontalFlip, 1.0}; }
  static TtaTransform rescale(double scale);
  static TtaTransform identity() { return rescale(1.0); }

  // "flip", "identity" or "scale:<factor>".
  static TtaTransform parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const TtaTransform&, const TtaTransform&) = default;
};

// Flip reverses column order; rescale resizes to round(dim * scale), at
// least 1.
ProbabilityMask apply_transform(const ProbabilityMask& mask, const TtaTransform& t);

// Maps a map predicted under `t` back to the original orientation and size.
ProbabilityMask invert_prediction(const ProbabilityMask& mask, const TtaTransform& t,
                                  int original_width, int original_height);
InstancePrediction invert_prediction(const InstancePrediction& pred, const TtaTransform& t,
                                     int original_width, int original_height);

struct AveragedMask {
  ProbabilityMask mask;
  double score = 0.0;
};

// Unweighted pixelwise mean and mean score. The running-mean update keeps
// identical inputs bit-exact. Throws std::invalid_argument on an empty list
// or mismatched score count, DimensionError on mismatched shapes.
AveragedMask tta_average(std::span<const ProbabilityMask> aligned,
                         std::span<const double> scores);

struct PredictionRef {
  std::size_t source = 0;
  std::size_t index = 0;

  friend bool operator==(const PredictionRef&, const PredictionRef&) = default;
};
using Cluster = std::vector<PredictionRef>;

// Greedy clustering of one image's predictions from several sources. In
// descending score order (ties: source, then index), each unclaimed
// prediction seeds a cluster and takes from every other source the unclaimed
// same-category prediction with the highest box IoU to the seed, if that IoU
// is >= iou_thresh. Clusters come out in seed order, seed first.
std::vector<Cluster> cluster_predictions(
    const std::vector<std::vector<InstancePrediction>>& per_source, double iou_thresh);

// Ensemble of one image's predictions from several models. Each cluster
// becomes one instance: pixelwise-mean mask, score = (sum of member scores) /
// total_models, bbox of the mean mask thresholded at 0.5. total_models = 0
// means per_model.size(). Throws InputError on mixed image ids.
std::vector<InstancePrediction> ensemble_merge(
    const std::vector<std::vector<InstancePrediction>>& per_model, double iou_thresh = 0.5,
    std::size_t total_models = 0);

// Test-time-augmentation fusion of one image: per_view holds predictions
// already mapped back with invert_prediction. Clusters like ensemble_merge,
// then combines each cluster with tta_average.
std::vector<InstancePrediction> tta_merge(
    const std::vector<std::vector<InstancePrediction>>& per_view, double iou_thresh = 0.5);

}  // namespace segkit

#endif  // SEGKIT_FUSION_HPP_
