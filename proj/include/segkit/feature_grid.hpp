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

#ifndef SEGKIT_FEATURE_GRID_HPP_
#define SEGKIT_FEATURE_GRID_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace segkit {

// C channels over a width x height grid; values are channel-major, row-major
// within a channel.
class FeatureGrid {
 public:
  FeatureGrid(int channels, int width, int height, std::vector<double> values);
  FeatureGrid(int channels, int width, int height);

  int channels() const { return channels_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }

  double at(int channel, int row, int col) const {
    return values_[channel * plane_size() + static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int channel, int row, int col, double v);
  std::span<const double> values() const { return values_; }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

 private:
  int channels_;
  int width_;
  int height_;
  std::vector<double> values_;
};

// Normalized, corner-aligned location: u = 0 is column 0 and u = 1 is column
// width - 1; v likewise for rows.
struct NormalizedPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

using PointSet = std::vector<NormalizedPoint>;

// Normalized coordinate of cell (row, col) on a width x height grid.
NormalizedPoint cell_point(int row, int col, int width, int height);

// Samples every channel at every point. Returns points.size() rows of
// channels() values each, flattened row-major. Coordinates are clamped to
// [0, 1].
std::vector<double> bilinear_sample(const FeatureGrid& grid,
                                    std::span<const NormalizedPoint> points);

// {"instance_id", "channels", "width", "height", "values"}
nlohmann::json feature_grid_to_json(const FeatureGrid& grid, long long instance_id);
FeatureGrid feature_grid_from_json(const nlohmann::json& j);

}  // namespace segkit

#endif  // SEGKIT_FEATURE_GRID_HPP_
