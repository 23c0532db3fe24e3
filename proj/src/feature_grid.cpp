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

#include "segkit/feature_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segkit/error.hpp"

namespace segkit {

FeatureGrid::FeatureGrid(int channels, int width, int height, std::vector<double> values)
    : channels_(channels), width_(width), height_(height), values_(std::move(values)) {
  if (channels < 1 || width < 1 || height < 1) {
    throw DimensionError("feature grid dimensions must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(channels) * plane_size()) {
    throw DimensionError("feature grid holds " + std::to_string(values_.size()) +
                         " values, expected " +
                         std::to_string(static_cast<std::size_t>(channels) * plane_size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("feature grid has a non-finite value");
  }
}

FeatureGrid::FeatureGrid(int channels, int width, int height)
    : FeatureGrid(channels, width, height,
                  std::vector<double>(static_cast<std::size_t>(std::max(channels, 0)) *
                                      std::max(width, 0) * std::max(height, 0))) {}

void FeatureGrid::set(int channel, int row, int col, double v) {
  if (!std::isfinite(v)) throw InputError("feature grid has a non-finite value");
  values_[channel * plane_size() + static_cast<std::size_t>(row) * width_ + col] = v;
}

NormalizedPoint cell_point(int row, int col, int width, int height) {
  return NormalizedPoint{width > 1 ? static_cast<double>(col) / (width - 1) : 0.0,
                         height > 1 ? static_cast<double>(row) / (height - 1) : 0.0};
}

std::vector<double> bilinear_sample(const FeatureGrid& grid,
                                    std::span<const NormalizedPoint> points) {
  const int w = grid.width();
  const int h = grid.height();
  const int channels = grid.channels();
  std::vector<double> out(points.size() * channels);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = std::clamp(points[i].u, 0.0, 1.0) * (w - 1);
    const double y = std::clamp(points[i].v, 0.0, 1.0) * (h - 1);
    const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    for (int c = 0; c < channels; ++c) {
      const double top = std::lerp(grid.at(c, y0, x0), grid.at(c, y0, x1), fx);
      const double bottom = std::lerp(grid.at(c, y1, x0), grid.at(c, y1, x1), fx);
      out[i * channels + c] = std::lerp(top, bottom, fy);
    }
  }
  return out;
}

nlohmann::json feature_grid_to_json(const FeatureGrid& grid, long long instance_id) {
  return nlohmann::json{{"instance_id", instance_id},
                        {"channels", grid.channels()},
                        {"width", grid.width()},
                        {"height", grid.height()},
                        {"values", grid.values()}};
}

FeatureGrid feature_grid_from_json(const nlohmann::json& j) {
  try {
    return FeatureGrid(j.at("channels").get<int>(), j.at("width").get<int>(),
                       j.at("height").get<int>(), j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("feature grid: ") + e.what());
  }
}

}  // namespace segkit
