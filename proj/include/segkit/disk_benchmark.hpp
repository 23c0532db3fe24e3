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

#ifndef SEGKIT_DISK_BENCHMARK_HPP_
#define SEGKIT_DISK_BENCHMARK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "segkit/mask.hpp"
#include "segkit/point_head.hpp"
#include "segkit/point_head_trainer.hpp"
#include "segkit/subdivision.hpp"

namespace segkit {

// Synthetic refinement task: one disk per instance in normalized [0, 1]^2.
// The coarse map comes from a deliberately imprecise disk (jittered centre
// and radius, soft edge) sampled on coarse_size^2 cells; the fine features
// see the true disk through noise.
struct DiskBenchmarkConfig {
  int coarse_size = 7;
  int steps = 2;
  int feature_size = 56;
  double feature_noise = 0.15;
  double coarse_center_jitter = 0.03;
  double coarse_radius_jitter = 0.10;  // relative
  double coarse_softness = 0.08;
  double min_radius = 0.15;
  double max_radius = 0.35;

  int output_size() const { return coarse_size << steps; }
};

inline constexpr int kDiskFeatureChannels = 3;

struct DiskInstance {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

// Cell (row, col) is foreground when its corner-aligned normalized centre
// lies within `radius` of (cx, cy).
BinaryMask rasterize_disk(const DiskInstance& disk, int width, int height);

std::vector<DiskInstance> sample_disks(std::size_t count, const DiskBenchmarkConfig& cfg,
                                       std::uint64_t seed);

// Ground truth is rasterize_disk at cfg.output_size().
std::vector<TrainingExample> make_disk_dataset(std::size_t count,
                                               const DiskBenchmarkConfig& cfg,
                                               std::uint64_t seed);

struct RefinementReport {
  std::vector<double> iou_bilinear;
  std::vector<double> iou_refined;
  double mean_iou_bilinear = 0.0;
  double mean_iou_refined = 0.0;

  double improvement() const { return mean_iou_refined - mean_iou_bilinear; }
};

// IoU against ground truth of the thresholded refined map and of the
// thresholded pure bilinear chain, per example.
RefinementReport evaluate_refinement(const PointHeadModel& model,
                                     std::span<const TrainingExample> dataset,
                                     const SubdivisionConfig& cfg, int threads = 1);

}  // namespace segkit

#endif  // SEGKIT_DISK_BENCHMARK_HPP_
