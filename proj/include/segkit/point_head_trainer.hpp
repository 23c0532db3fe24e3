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

#ifndef SEGKIT_POINT_HEAD_TRAINER_HPP_
#define SEGKIT_POINT_HEAD_TRAINER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "segkit/feature_grid.hpp"
#include "segkit/focal_loss.hpp"
#include "segkit/mask.hpp"
#include "segkit/point_head.hpp"

namespace segkit {

struct TrainingExample {
  FeatureGrid features;
  ProbabilityMask coarse;
  // Labels; also fixes the resolution at which training points are drawn.
  BinaryMask ground_truth;
};

struct TrainingOptions {
  FocalLossParams loss;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int epochs = 10;
  int batch_size = 8;
  // Per example and epoch: this many most-uncertain cells plus the same
  // number of uniformly drawn cells.
  int points_per_example = 196;
  std::vector<int> hidden_widths = default_hidden_widths();
  std::uint64_t seed = 42;

  void validate() const;
};

struct TrainingResult {
  PointHeadModel model;
  // Mean point loss of each epoch; each batch is scored before its update.
  std::vector<double> epoch_loss;
};

// Focal loss of one labelled point and its gradient path.
double point_loss(const PointHeadModel& model, std::span<const double> feature,
                  double coarse_prob, int target, const FocalLossParams& params);
// Returns point_loss and adds its parameter gradient, scaled by `scale`, to grad.
double point_loss_backward(const PointHeadModel& model, std::span<const double> feature,
                           double coarse_prob, int target, const FocalLossParams& params,
                           double scale, std::vector<DenseLayer>& grad);

// Upsamples `coarse` to width x height by repeated x2 steps while they land
// exactly, then one direct resize for any remainder.
ProbabilityMask upsample_to(const ProbabilityMask& coarse, int width, int height);

// Mini-batch SGD with momentum on the focal point loss. Starts from
// PointHeadModel::random(channels + 1, hidden_widths, seed). Throws
// TrainingError if an epoch's loss is not finite.
TrainingResult train_point_head(std::span<const TrainingExample> dataset,
                                const TrainingOptions& options);
TrainingResult train_point_head(PointHeadModel initial,
                                std::span<const TrainingExample> dataset,
                                const TrainingOptions& options);

}  // namespace segkit

#endif  // SEGKIT_POINT_HEAD_TRAINER_HPP_
