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

#ifndef SEGKIT_COCO_EVAL_HPP_
#define SEGKIT_COCO_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "segkit/annotations.hpp"
#include "segkit/prediction.hpp"
#include "segkit/rle.hpp"

namespace segkit {

std::vector<double> default_iou_thresholds();  // 0.50, 0.55, ..., 0.95

struct EvalParams {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  std::size_t max_dets_per_image = 100;
  double small_area_max = 32.0 * 32.0;  // small: area < this
  double large_area_min = 96.0 * 96.0;  // large: area > this
  int threads = 1;
};

enum class AreaRange { kAll = 0, kSmall, kMedium, kLarge };
inline constexpr std::size_t kAreaRangeCount = 4;

bool in_area_range(double area, AreaRange range, const EvalParams& params);

// Sentinel for "no ground truth".
inline constexpr double kNoGroundTruth = -1.0;

struct CategoryAp {
  std::int64_t category_id = 0;
  std::string name;
  double ap = kNoGroundTruth;  // averaged over IoU thresholds, all areas
};

struct EvalResult {
  double map = kNoGroundTruth;
  double ap50 = kNoGroundTruth;
  double ap75 = kNoGroundTruth;
  double ap_small = kNoGroundTruth;
  double ap_medium = kNoGroundTruth;
  double ap_large = kNoGroundTruth;
  std::vector<CategoryAp> per_category;
  // Detections dropped for naming an unknown category or image.
  std::size_t ignored_detections = 0;
};

enum class MatchOutcome : std::uint8_t { kTruePositive, kFalsePositive, kIgnored };

// Greedy matching of score-sorted detections. Each detection takes the
// unmatched, non-ignored ground truth with the highest IoU (ties: lowest
// index) if that IoU >= iou_thresh. Failing that it may claim an ignored
// ground truth and is itself ignored; otherwise it is a false positive,
// ignored when det_ignored marks it as outside the evaluated area range.
// `ious` is dets x gts, row-major.
std::vector<MatchOutcome> match_with_ignore(std::span<const double> ious, std::size_t num_dets,
                                            std::span<const char> gt_ignored,
                                            std::span<const char> det_ignored,
                                            double iou_thresh);

// Plain form with nothing ignored; true marks a true positive.
std::vector<bool> match_detections(std::span<const Rle> dets, std::span<const Rle> gts,
                                   double iou_thresh);

// 101-point interpolated AP: mean over recall levels 0, 0.01, ..., 1 of the
// best precision reached at recall >= level. kNoGroundTruth when num_gt == 0.
double average_precision(const std::vector<bool>& true_positive, std::size_t num_gt);

EvalResult coco_map(const AnnotationSet& gt, std::span<const InstancePrediction> dets,
                    const EvalParams& params = {});

nlohmann::json eval_result_to_json(const EvalResult& result);
EvalResult eval_result_from_json(const nlohmann::json& j);
std::string format_eval_table(const EvalResult& result);

}  // namespace segkit

#endif  // SEGKIT_COCO_EVAL_HPP_
