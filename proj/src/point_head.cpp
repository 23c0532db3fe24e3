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

#include "segkit/point_head.hpp"

#include <cmath>
#include <string>

#include "segkit/error.hpp"
#include "segkit/rng.hpp"

namespace segkit {
namespace {

std::vector<int> layer_widths(int in_dim, const std::vector<int>& hidden) {
  std::vector<int> widths{in_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  return widths;
}

std::vector<DenseLayer> zero_layers(int in_dim, const std::vector<int>& hidden) {
  const auto widths = layer_widths(in_dim, hidden);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    layers.push_back(DenseLayer{in, out,
                                std::vector<double>(static_cast<std::size_t>(in) * out, 0.0),
                                std::vector<double>(out, 0.0)});
  }
  return layers;
}

void check_shape(int in_dim, const std::vector<int>& hidden) {
  if (in_dim < 1) throw DimensionError("point head in_dim must be positive");
  for (int w : hidden) {
    if (w < 1) throw DimensionError("hidden widths must be positive");
  }
}

// Fills `acts` with the post-activation value of every layer (input first).
double run_layers(const PointHeadModel& model, std::span<const double> feature,
                  double coarse_prob, std::vector<std::vector<double>>& acts) {
  if (static_cast<int>(feature.size()) + 1 != model.in_dim()) {
    throw DimensionError("point feature has " + std::to_string(feature.size()) +
                         " channels, model expects " + std::to_string(model.in_dim() - 1));
  }
  const auto& layers = model.layers();
  acts.resize(layers.size() + 1);
  acts[0].assign(feature.begin(), feature.end());
  acts[0].push_back(coarse_prob);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    const bool hidden = l + 1 < layers.size();
    auto& out = acts[l + 1];
    out.assign(layer.out, 0.0);
    const auto& x = acts[l];
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      double z = layer.bias[o];
      for (int i = 0; i < layer.in; ++i) z += row[i] * x[i];
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
  }
  return acts.back()[0];
}

}  // namespace

PointHeadModel::PointHeadModel(int in_dim, std::vector<int> hidden_widths)
    : in_dim_(in_dim), hidden_widths_(std::move(hidden_widths)) {
  check_shape(in_dim_, hidden_widths_);
  layers_ = zero_layers(in_dim_, hidden_widths_);
}

PointHeadModel::PointHeadModel(int in_dim, std::vector<int> hidden_widths,
                               std::vector<DenseLayer> layers)
    : in_dim_(in_dim), hidden_widths_(std::move(hidden_widths)), layers_(std::move(layers)) {
  check_shape(in_dim_, hidden_widths_);
  const auto widths = layer_widths(in_dim_, hidden_widths_);
  if (layers_.size() + 1 != widths.size()) {
    throw DimensionError("point head has " + std::to_string(layers_.size()) +
                         " layers, expected " + std::to_string(widths.size() - 1));
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& layer = layers_[i];
    if (layer.in != widths[i] || layer.out != widths[i + 1] ||
        layer.weights.size() != static_cast<std::size_t>(layer.in) * layer.out ||
        layer.bias.size() != static_cast<std::size_t>(layer.out)) {
      throw DimensionError("point head layer " + std::to_string(i) + " has the wrong shape");
    }
    for (double v : layer.weights) {
      if (!std::isfinite(v)) throw InputError("point head has a non-finite weight");
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) throw InputError("point head has a non-finite bias");
    }
  }
}

PointHeadModel PointHeadModel::random(int in_dim, std::vector<int> hidden_widths,
                                      std::uint64_t seed) {
  PointHeadModel model(in_dim, std::move(hidden_widths));
  Rng rng(seed);
  for (auto& layer : model.layers_) {
    const double limit = std::sqrt(6.0 / layer.in);
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
  }
  return model;
}

std::size_t PointHeadModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double point_head_logit(const PointHeadModel& model, std::span<const double> feature,
                        double coarse_prob) {
  thread_local std::vector<std::vector<double>> acts;
  return run_layers(model, feature, coarse_prob, acts);
}

double point_head_forward(const PointHeadModel& model, std::span<const double> feature,
                          double coarse_prob) {
  return sigmoid(point_head_logit(model, feature, coarse_prob));
}

std::vector<DenseLayer> zero_gradient(const PointHeadModel& model) {
  return zero_layers(model.in_dim(), model.hidden_widths());
}

double point_head_backward(const PointHeadModel& model, std::span<const double> feature,
                           double coarse_prob, double dloss_dlogit,
                           std::vector<DenseLayer>& grad) {
  thread_local std::vector<std::vector<double>> acts;
  thread_local std::vector<double> delta, prev_delta;
  const double logit = run_layers(model, feature, coarse_prob, acts);
  const auto& layers = model.layers();

  delta.assign(1, dloss_dlogit);
  for (std::size_t l = layers.size(); l-- > 0;) {
    const DenseLayer& layer = layers[l];
    DenseLayer& g = grad[l];
    const auto& x = acts[l];
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      g.bias[o] += d;
      double* grow = g.weights.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) grow[i] += d * x[i];
    }
    if (l == 0) break;
    // Propagate through W^T, then through the ReLU of the layer below.
    prev_delta.assign(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) prev_delta[i] += row[i] * d;
    }
    for (int i = 0; i < layer.in; ++i) {
      if (x[i] <= 0.0) prev_delta[i] = 0.0;
    }
    delta.swap(prev_delta);
  }
  return logit;
}

nlohmann::json point_head_to_json(const PointHeadModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : model.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int o = 0; o < layer.out; ++o) {
      auto begin = layer.weights.begin() + static_cast<std::ptrdiff_t>(o) * layer.in;
      rows.push_back(std::vector<double>(begin, begin + layer.in));
    }
    layers.push_back({{"w", rows}, {"b", layer.bias}});
  }
  return nlohmann::json{{"in_dim", model.in_dim()},
                        {"hidden_widths", model.hidden_widths()},
                        {"layers", layers}};
}

PointHeadModel point_head_from_json(const nlohmann::json& j) {
  try {
    const int in_dim = j.at("in_dim").get<int>();
    auto hidden = j.at("hidden_widths").get<std::vector<int>>();
    std::vector<DenseLayer> layers;
    for (const auto& jl : j.at("layers")) {
      DenseLayer layer;
      const auto& rows = jl.at("w");
      layer.out = static_cast<int>(rows.size());
      layer.in = rows.empty() ? 0 : static_cast<int>(rows.front().size());
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != layer.in) {
          throw InputError("point head weight rows differ in length");
        }
        for (const auto& v : row) layer.weights.push_back(v.get<double>());
      }
      layer.bias = jl.at("b").get<std::vector<double>>();
      layers.push_back(std::move(layer));
    }
    return PointHeadModel(in_dim, std::move(hidden), std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("point head model: ") + e.what());
  }
}

}  // namespace segkit
