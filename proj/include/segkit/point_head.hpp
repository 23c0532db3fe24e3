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

#ifndef SEGKIT_POINT_HEAD_HPP_
#define SEGKIT_POINT_HEAD_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace segkit {

// Fully connected layer; `weights` is out x in, row-major.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

inline std::vector<int> default_hidden_widths() { return {64, 64, 64}; }

// Point classifier: ReLU MLP over concat(point feature, coarse probability)
// ending in one logit. in_dim = feature channels + 1.
class PointHeadModel {
 public:
  // All parameters zero.
  PointHeadModel(int in_dim, std::vector<int> hidden_widths);
  // Takes ownership of explicit layers and checks that their shapes chain.
  PointHeadModel(int in_dim, std::vector<int> hidden_widths, std::vector<DenseLayer> layers);

  // He-uniform weights for the ReLU layers, zero biases.
  static PointHeadModel random(int in_dim, std::vector<int> hidden_widths,
                               std::uint64_t seed);

  int in_dim() const { return in_dim_; }
  const std::vector<int>& hidden_widths() const { return hidden_widths_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  std::size_t parameter_count() const;

  friend bool operator==(const PointHeadModel&, const PointHeadModel&) = default;

 private:
  int in_dim_;
  std::vector<int> hidden_widths_;
  std::vector<DenseLayer> layers_;
};

double sigmoid(double z);

// Throws DimensionError unless feature.size() + 1 == model.in_dim().
double point_head_logit(const PointHeadModel& model, std::span<const double> feature,
                        double coarse_prob);
double point_head_forward(const PointHeadModel& model, std::span<const double> feature,
                          double coarse_prob);

// Zero-valued gradient buffers shaped like the model's layers.
std::vector<DenseLayer> zero_gradient(const PointHeadModel& model);

// Adds dloss_dlogit * d(logit)/d(parameter) into `grad` and returns the logit.
double point_head_backward(const PointHeadModel& model, std::span<const double> feature,
                           double coarse_prob, double dloss_dlogit,
                           std::vector<DenseLayer>& grad);

// {"in_dim", "hidden_widths", "layers": [{"w": [[...], ...], "b": [...]}, ...]}
nlohmann::json point_head_to_json(const PointHeadModel& model);
PointHeadModel point_head_from_json(const nlohmann::json& j);

}  // namespace segkit

#endif  // SEGKIT_POINT_HEAD_HPP_
