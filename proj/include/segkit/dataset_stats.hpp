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

#ifndef SEGKIT_DATASET_STATS_HPP_
#define SEGKIT_DATASET_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "segkit/annotations.hpp"

namespace segkit {

struct CategoryCount {
  std::int64_t category_id = 0;
  std::string name;
  std::size_t count = 0;

  friend bool operator==(const CategoryCount&, const CategoryCount&) = default;
};

// One entry per declared category, in id order, zeros included.
std::vector<CategoryCount> category_histogram(const AnnotationSet& set);

// Default edges 96^2 and 256^2 pixels.
std::vector<double> default_area_edges();

// Fractions of instances whose mask area falls in (-inf, e0], (e0, e1], ...,
// (e_last, inf). Throws std::invalid_argument for an empty set or edges that
// are not strictly increasing.
std::vector<double> area_buckets(const AnnotationSet& set,
                                 std::span<const double> edges = default_area_edges());

// Named h:w ratios the anchor recommendation picks from, in increasing h/w.
struct AspectRatio {
  int h = 1;
  int w = 1;

  double value() const { return static_cast<double>(h) / w; }
  std::string label() const { return std::to_string(h) + ":" + std::to_string(w); }
  friend bool operator==(const AspectRatio&, const AspectRatio&) = default;
};
std::vector<AspectRatio> candidate_ratios();  // 1:3, 1:2, 1:1, 2:1, 3:1

// Interior edges in ln(h/w) between neighbouring candidate ratios, at their
// geometric midpoints. Bin i is [edge_{i-1}, edge_i) with open outer ends.
std::vector<double> default_log_ratio_edges();

struct AspectHistogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;  // edges.size() + 1 bins
  std::size_t degenerate = 0;       // empty masks (zero-width or zero-height box)
};

// Histogram of ln(h/w) of each instance's mask bounding box.
AspectHistogram aspect_ratio_histogram(const AnnotationSet& set,
                                       std::span<const double> log_edges =
                                           default_log_ratio_edges());

struct AnchorConfig {
  std::vector<int> sizes;
  std::vector<AspectRatio> ratios;

  friend bool operator==(const AnchorConfig&, const AnchorConfig&) = default;
};

// Training images are resized to 1200..1500 px from 1200 px originals; the
// midpoint factor scales object sizes before the anchor ladder is fitted.
inline constexpr double kAnchorResizeFactor = 1350.0 / 1200.0;

// Sizes: powers of two from the one nearest (in log2) to the 5th percentile
// of scaled sqrt(area) up to the one nearest the 95th. Ratios: the smallest
// of {1:1}, {1:2, 1:1, 2:1}, {1:3, ..., 3:1} whose bins hold >= coverage of
// the non-degenerate instances (the largest set if none does).
AnchorConfig recommend_anchors(const AnnotationSet& set, double coverage = 0.9);

// Linear-interpolation quantile of sorted values, q in [0, 1].
double quantile(std::span<const double> sorted, double q);

struct DatasetStats {
  std::size_t images = 0;
  std::size_t instances = 0;
  std::vector<CategoryCount> categories;
  std::vector<double> area_edges;
  std::vector<double> area_fractions;
  AspectHistogram aspect;
  AnchorConfig anchors;
};

DatasetStats compute_stats(const AnnotationSet& set, double coverage = 0.9);
nlohmann::json stats_to_json(const DatasetStats& stats);
std::string format_stats_report(const DatasetStats& stats);
// category_id,name,count rows followed by bin,lower,upper,count rows.
std::string stats_to_csv(const DatasetStats& stats);

}  // namespace segkit

#endif  // SEGKIT_DATASET_STATS_HPP_
