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

#ifndef SEGKIT_PREDICTION_HPP_
#define SEGKIT_PREDICTION_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "segkit/mask.hpp"
#include "segkit/rle.hpp"

namespace segkit {

// One detected instance. Probability masks are an in-memory form; files carry
// the binarized RLE.
struct InstancePrediction {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  double score = 0.0;
  BBox bbox;
  std::variant<ProbabilityMask, Rle> mask;
};

inline constexpr double kMaskThreshold = 0.5;

int mask_width(const InstancePrediction& pred);
int mask_height(const InstancePrediction& pred);
ProbabilityMask probability_of(const InstancePrediction& pred);
// Probability masks are thresholded at kMaskThreshold.
Rle rle_of(const InstancePrediction& pred);

// COCO results convention:
// [{"image_id", "category_id", "score", "bbox": [x, y, w, h], "segmentation": RLE}]
// The bbox is written for readers that want it; on read it is recomputed
// from the mask.
nlohmann::json predictions_to_json(const std::vector<InstancePrediction>& preds);
std::vector<InstancePrediction> predictions_from_json(const nlohmann::json& j);

// Orders by image id, keeping the relative order inside an image.
void sort_by_image(std::vector<InstancePrediction>& preds);

}  // namespace segkit

#endif  // SEGKIT_PREDICTION_HPP_
