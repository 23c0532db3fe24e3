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

#include "segkit/point_head_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "segkit/error.hpp"
#include "segkit/rng.hpp"
#include "segkit/subdivision.hpp"

namespace segkit {
namespace {

// Labelled training points of one example, features already sampled.
struct PointBatch {
  std::vector<double> features;  // rows of `channels`
  std::vector<double> coarse;
  std::vector<int> labels;
};

void append_cells(const TrainingExample& ex, const ProbabilityMask& upsampled,
                  std::span<const std::size_t> cells, PointBatch& batch) {
  const int w = upsampled.width();
  const int h = upsampled.height();
  PointSet points;
  points.reserve(cells.size());
  for (std::size_t cell : cells) {
    points.push_back(cell_point(static_cast<int>(cell / w), static_cast<int>(cell % w), w, h));
    batch.coarse.push_back(upsampled[cell]);
    batch.labels.push_back(ex.ground_truth[cell] ? 1 : 0);
  }
  const auto f = bilinear_sample(ex.features, points);
  batch.features.insert(batch.features.end(), f.begin(), f.end());
}

}  // namespace

void TrainingOptions::validate() const {
  loss.validate();
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must lie in [0, 1)");
  }
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (points_per_example < 1) throw std::invalid_argument("points_per_example must be >= 1");
}

double point_loss(const PointHeadModel& model, std::span<const double> feature,
                  double coarse_prob, int target, const FocalLossParams& params) {
  return focal_binary(point_head_forward(model, feature, coarse_prob), target, params);
}

double point_loss_backward(const PointHeadModel& model, std::span<const double> feature,
                           double coarse_prob, int target, const FocalLossParams& params,
                           double scale, std::vector<DenseLayer>& grad) {
  const double p = point_head_forward(model, feature, coarse_prob);
  const double dlogit = focal_binary_grad(p, target, params) * p * (1.0 - p);
  point_head_backward(model, feature, coarse_prob, scale * dlogit, grad);
  return focal_binary(p, target, params);
}

ProbabilityMask upsample_to(const ProbabilityMask& coarse, int width, int height) {
  ProbabilityMask current = coarse;
  while (current.width() * 2 <= width && current.height() * 2 <= height &&
         width % (current.width() * 2) == 0 && height % (current.height() * 2) == 0) {
    current = resize_prob(current, current.width() * 2, current.height() * 2);
  }
  if (current.width() != width || current.height() != height) {
    current = resize_prob(current, width, height);
  }
  return current;
}

TrainingResult train_point_head(std::span<const TrainingExample> dataset,
                                const TrainingOptions& options) {
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
  return train_point_head(
      PointHeadModel::random(dataset.front().features.channels() + 1, options.hidden_widths,
                             options.seed),
      dataset, options);
}

TrainingResult train_point_head(PointHeadModel model,
                                std::span<const TrainingExample> dataset,
                                const TrainingOptions& options) {
  options.validate();
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
  for (const auto& ex : dataset) {
    if (ex.features.channels() + 1 != model.in_dim()) {
      throw DimensionError("training example channel count does not match the model");
    }
  }

  // The uncertain half of every example's points is fixed; only the uniform
  // half is redrawn each epoch.
  std::vector<ProbabilityMask> upsampled;
  std::vector<PointBatch> fixed(dataset.size());
  upsampled.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& ex = dataset[i];
    upsampled.push_back(
        upsample_to(ex.coarse, ex.ground_truth.width(), ex.ground_truth.height()));
    append_cells(ex, upsampled.back(), uncertain_cells(upsampled.back(), options.points_per_example),
                 fixed[i]);
  }

  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t channels = static_cast<std::size_t>(model.in_dim() - 1);
  std::vector<DenseLayer> grad = zero_gradient(model);
  std::vector<DenseLayer> velocity = zero_gradient(model);
  std::vector<std::size_t> order(dataset.size());
  std::vector<std::size_t> random_cells(static_cast<std::size_t>(options.points_per_example));
  TrainingResult result{model, {}};

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }

    double epoch_loss = 0.0;
    std::size_t epoch_points = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));

      std::vector<const PointBatch*> parts;
      std::vector<PointBatch> drawn(stop - start);
      std::size_t batch_points = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        const auto& up = upsampled[idx];
        for (auto& cell : random_cells) cell = rng.index(up.size());
        append_cells(dataset[idx], up, random_cells, drawn[k - start]);
        parts.push_back(&fixed[idx]);
        parts.push_back(&drawn[k - start]);
        batch_points += fixed[idx].labels.size() + drawn[k - start].labels.size();
      }

      for (auto& g : grad) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      const double scale = 1.0 / static_cast<double>(batch_points);
      for (const PointBatch* part : parts) {
        for (std::size_t p = 0; p < part->labels.size(); ++p) {
          std::span<const double> feature(part->features.data() + p * channels, channels);
          epoch_loss += point_loss_backward(model, feature, part->coarse[p], part->labels[p],
                                            options.loss, scale, grad);
        }
      }
      epoch_points += batch_points;

      auto& layers = model.mutable_layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t j = 0; j < layers[l].weights.size(); ++j) {
          double& v = velocity[l].weights[j];
          v = options.momentum * v - options.learning_rate * grad[l].weights[j];
          layers[l].weights[j] += v;
        }
        for (std::size_t j = 0; j < layers[l].bias.size(); ++j) {
          double& v = velocity[l].bias[j];
          v = options.momentum * v - options.learning_rate * grad[l].bias[j];
          layers[l].bias[j] += v;
        }
      }
    }

    const double mean = epoch_loss / static_cast<double>(epoch_points);
    if (!std::isfinite(mean)) throw TrainingError(epoch, "point loss is not finite");
    result.epoch_loss.push_back(mean);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace segkit
