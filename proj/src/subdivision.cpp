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

#include "segkit/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "segkit/error.hpp"

namespace segkit {

void SubdivisionConfig::validate() const {
  if (coarse_size < 1) throw std::invalid_argument("coarse_size must be >= 1");
  if (steps < 0 || steps > 16) throw std::invalid_argument("steps must be in [0, 16]");
  if (points_per_step < 1) throw std::invalid_argument("points_per_step must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must be in [0, 1]");
  }
}

std::vector<std::size_t> uncertain_cells(const ProbabilityMask& prob, int n) {
  if (n < 1) throw std::invalid_argument("uncertain_cells: n must be >= 1");
  const std::size_t k = std::min(static_cast<std::size_t>(n), prob.size());
  std::vector<std::size_t> order(prob.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ua = std::abs(prob[a] - 0.5);
                      const double ub = std::abs(prob[b] - 0.5);
                      return ua < ub || (ua == ub && a < b);
                    });
  order.resize(k);
  return order;
}

PointSet uncertain_points(const ProbabilityMask& prob, int n) {
  PointSet points;
  for (std::size_t cell : uncertain_cells(prob, n)) {
    const int row = static_cast<int>(cell / prob.width());
    const int col = static_cast<int>(cell % prob.width());
    points.push_back(cell_point(row, col, prob.width(), prob.height()));
  }
  return points;
}

ProbabilityMask subdivision_refine(const PointPredictor& predictor,
                                   const ProbabilityMask& coarse,
                                   const FeatureGrid& fine_features,
                                   const SubdivisionConfig& cfg) {
  cfg.validate();
  if (coarse.width() != cfg.coarse_size || coarse.height() != cfg.coarse_size) {
    throw DimensionError("coarse map is " + std::to_string(coarse.width()) + "x" +
                         std::to_string(coarse.height()) + ", expected " +
                         std::to_string(cfg.coarse_size) + "x" +
                         std::to_string(cfg.coarse_size));
  }
  const std::size_t channels = static_cast<std::size_t>(fine_features.channels());
  ProbabilityMask current = coarse;
  for (int step = 0; step < cfg.steps; ++step) {
    current = resize_prob(current, current.width() * 2, current.height() * 2);
    const auto cells = uncertain_cells(current, cfg.points_per_step);
    PointSet points;
    points.reserve(cells.size());
    for (std::size_t cell : cells) {
      points.push_back(cell_point(static_cast<int>(cell / current.width()),
                                  static_cast<int>(cell % current.width()), current.width(),
                                  current.height()));
    }
    const auto features = bilinear_sample(fine_features, points);
    // Predictions read the upsampled map, so compute all before writing any.
    std::vector<double> predicted(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::span<const double> feature(features.data() + i * channels, channels);
      predicted[i] = std::clamp(predictor(feature, current[cells[i]]), 0.0, 1.0);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) current.set_index(cells[i], predicted[i]);
  }
  return current;
}

ProbabilityMask subdivision_refine(const PointHeadModel& model,
                                   const ProbabilityMask& coarse,
                                   const FeatureGrid& fine_features,
                                   const SubdivisionConfig& cfg) {
  if (model.in_dim() != fine_features.channels() + 1) {
    throw DimensionError("point head expects " + std::to_string(model.in_dim() - 1) +
                         " feature channels, grid has " +
                         std::to_string(fine_features.channels()));
  }
  return subdivision_refine(
      [&model](std::span<const double> feature, double p) {
        return point_head_forward(model, feature, p);
      },
      coarse, fine_features, cfg);
}

ProbabilityMask bilinear_chain(const ProbabilityMask& coarse, int steps) {
  ProbabilityMask current = coarse;
  for (int step = 0; step < steps; ++step) {
    current = resize_prob(current, current.width() * 2, current.height() * 2);
  }
  return current;
}

}  // namespace segkit
