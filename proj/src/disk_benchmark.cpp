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

#include "segkit/disk_benchmark.hpp"

#include <cmath>

#include "segkit/parallel.hpp"
#include "segkit/rng.hpp"

namespace segkit {
namespace {

double distance_at(const DiskInstance& d, int row, int col, int width, int height) {
  const NormalizedPoint p = cell_point(row, col, width, height);
  return std::hypot(p.u - d.cx, p.v - d.cy);
}

FeatureGrid disk_features(const DiskInstance& disk, const DiskBenchmarkConfig& cfg, Rng& rng) {
  const int n = cfg.feature_size;
  FeatureGrid grid(kDiskFeatureChannels, n, n);
  const BinaryMask inside = rasterize_disk(disk, n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      grid.set(0, r, c, (inside.at(r, c) ? 1.0 : 0.0) + cfg.feature_noise * rng.normal());
    }
  }
  // Channel 1 is a 3x3 box average of channel 0; channel 2 is pure noise.
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double sum = 0.0;
      int taps = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
          sum += grid.at(0, rr, cc);
          ++taps;
        }
      }
      grid.set(1, r, c, sum / taps);
      grid.set(2, r, c, rng.normal());
    }
  }
  return grid;
}

ProbabilityMask disk_coarse(const DiskInstance& disk, const DiskBenchmarkConfig& cfg, Rng& rng) {
  DiskInstance blurred = disk;
  blurred.cx += rng.uniform(-cfg.coarse_center_jitter, cfg.coarse_center_jitter);
  blurred.cy += rng.uniform(-cfg.coarse_center_jitter, cfg.coarse_center_jitter);
  blurred.radius *= 1.0 + rng.uniform(-cfg.coarse_radius_jitter, cfg.coarse_radius_jitter);
  const int n = cfg.coarse_size;
  ProbabilityMask coarse(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double d = distance_at(blurred, r, c, n, n);
      coarse.set(r, c, sigmoid((blurred.radius - d) / cfg.coarse_softness));
    }
  }
  return coarse;
}

}  // namespace

BinaryMask rasterize_disk(const DiskInstance& disk, int width, int height) {
  BinaryMask mask(width, height);
  const double r2 = disk.radius * disk.radius;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const NormalizedPoint p = cell_point(r, c, width, height);
      const double dx = p.u - disk.cx;
      const double dy = p.v - disk.cy;
      mask.set(r, c, dx * dx + dy * dy <= r2);
    }
  }
  return mask;
}

std::vector<DiskInstance> sample_disks(std::size_t count, const DiskBenchmarkConfig& cfg,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DiskInstance> disks(count);
  for (auto& d : disks) {
    d.radius = rng.uniform(cfg.min_radius, cfg.max_radius);
    d.cx = rng.uniform(0.3, 0.7);
    d.cy = rng.uniform(0.3, 0.7);
  }
  return disks;
}

std::vector<TrainingExample> make_disk_dataset(std::size_t count,
                                               const DiskBenchmarkConfig& cfg,
                                               std::uint64_t seed) {
  const auto disks = sample_disks(count, cfg, seed);
  Rng rng(seed + 0x5bd1e995ULL);
  std::vector<TrainingExample> out;
  out.reserve(count);
  for (const auto& disk : disks) {
    FeatureGrid features = disk_features(disk, cfg, rng);
    ProbabilityMask coarse = disk_coarse(disk, cfg, rng);
    out.push_back(TrainingExample{std::move(features), std::move(coarse),
                                  rasterize_disk(disk, cfg.output_size(), cfg.output_size())});
  }
  return out;
}

RefinementReport evaluate_refinement(const PointHeadModel& model,
                                     std::span<const TrainingExample> dataset,
                                     const SubdivisionConfig& cfg, int threads) {
  RefinementReport report;
  report.iou_bilinear.resize(dataset.size());
  report.iou_refined.resize(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const auto& ex = dataset[i];
    const auto refined = subdivision_refine(model, ex.coarse, ex.features, cfg);
    const auto baseline = bilinear_chain(ex.coarse, cfg.steps);
    report.iou_refined[i] = mask_iou(threshold(refined, cfg.threshold), ex.ground_truth);
    report.iou_bilinear[i] = mask_iou(threshold(baseline, cfg.threshold), ex.ground_truth);
  });
  double sb = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    sb += report.iou_bilinear[i];
    sr += report.iou_refined[i];
  }
  if (!dataset.empty()) {
    report.mean_iou_bilinear = sb / static_cast<double>(dataset.size());
    report.mean_iou_refined = sr / static_cast<double>(dataset.size());
  }
  return report;
}

}  // namespace segkit
