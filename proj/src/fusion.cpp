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

#include "segkit/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "segkit/error.hpp"

namespace segkit {
namespace {

int scaled_length(int len, double scale) {
  return std::max(1, static_cast<int>(std::lround(len * scale)));
}

ProbabilityMask flip_columns(const ProbabilityMask& mask) {
  ProbabilityMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      out.set(r, c, mask.at(r, mask.width() - 1 - c));
    }
  }
  return out;
}

std::int64_t common_image_id(const std::vector<std::vector<InstancePrediction>>& groups) {
  const InstancePrediction* first = nullptr;
  for (const auto& group : groups) {
    for (const auto& p : group) {
      if (first == nullptr) {
        first = &p;
      } else if (p.image_id != first->image_id) {
        throw InputError("predictions from images " + std::to_string(first->image_id) +
                         " and " + std::to_string(p.image_id) + " cannot be fused together");
      }
    }
  }
  return first == nullptr ? 0 : first->image_id;
}

std::vector<ProbabilityMask> member_masks(
    const std::vector<std::vector<InstancePrediction>>& groups, const Cluster& cluster) {
  std::vector<ProbabilityMask> masks;
  masks.reserve(cluster.size());
  for (const auto& ref : cluster) masks.push_back(probability_of(groups[ref.source][ref.index]));
  return masks;
}

}  // namespace

TtaTransform TtaTransform::rescale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("TTA scale must be positive");
  }
  return {Kind::kRescale, scale};
}

TtaTransform TtaTransform::parse(std::string_view text) {
  if (text == "flip" || text == "horizontal_flip") return horizontal_flip();
  if (text == "identity") return identity();
  constexpr std::string_view kScale = "scale:";
  if (text.substr(0, kScale.size()) == kScale) {
    const std::string number(text.substr(kScale.size()));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == number.size() && used > 0) return rescale(value);
  }
  throw std::invalid_argument("unknown TTA transform '" + std::string(text) + "'");
}

std::string TtaTransform::to_string() const {
  if (kind == Kind::kHorizontalFlip) return "flip";
  std::ostringstream os;
  os << "scale:" << scale;
  return os.str();
}

ProbabilityMask apply_transform(const ProbabilityMask& mask, const TtaTransform& t) {
  if (t.kind == TtaTransform::Kind::kHorizontalFlip) return flip_columns(mask);
  const int w = scaled_length(mask.width(), t.scale);
  const int h = scaled_length(mask.height(), t.scale);
  if (w == mask.width() && h == mask.height()) return mask;
  return resize_prob(mask, w, h);
}

ProbabilityMask invert_prediction(const ProbabilityMask& mask, const TtaTransform& t,
                                  int original_width, int original_height) {
  ProbabilityMask out = t.kind == TtaTransform::Kind::kHorizontalFlip ? flip_columns(mask) : mask;
  if (out.width() != original_width || out.height() != original_height) {
    out = resize_prob(out, original_width, original_height);
  }
  return out;
}

InstancePrediction invert_prediction(const InstancePrediction& pred, const TtaTransform& t,
                                     int original_width, int original_height) {
  ProbabilityMask mask =
      invert_prediction(probability_of(pred), t, original_width, original_height);
  const BBox box = bbox_of(threshold(mask, kMaskThreshold));
  return InstancePrediction{pred.image_id, pred.category_id, pred.score, box, std::move(mask)};
}

AveragedMask tta_average(std::span<const ProbabilityMask> aligned,
                         std::span<const double> scores) {
  if (aligned.empty()) throw std::invalid_argument("tta_average needs at least one map");
  if (scores.size() != aligned.size()) {
    throw std::invalid_argument("tta_average needs one score per map");
  }
  const int w = aligned.front().width();
  const int h = aligned.front().height();
  std::vector<double> mean(aligned.front().probs().begin(), aligned.front().probs().end());
  double score = scores.front();
  for (std::size_t k = 1; k < aligned.size(); ++k) {
    const auto& m = aligned[k];
    if (m.width() != w || m.height() != h) {
      throw DimensionError("tta_average: maps differ in shape");
    }
    const double n = static_cast<double>(k + 1);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (m[i] - mean[i]) / n;
    score += (scores[k] - score) / n;
  }
  for (double& v : mean) v = std::clamp(v, 0.0, 1.0);
  return AveragedMask{ProbabilityMask(w, h, std::move(mean)), score};
}

std::vector<Cluster> cluster_predictions(
    const std::vector<std::vector<InstancePrediction>>& per_source, double iou_thresh) {
  std::vector<PredictionRef> order;
  for (std::size_t s = 0; s < per_source.size(); ++s) {
    for (std::size_t i = 0; i < per_source[s].size(); ++i) order.push_back({s, i});
  }
  auto at = [&](const PredictionRef& r) -> const InstancePrediction& {
    return per_source[r.source][r.index];
  };
  // Ties fall back to (source, index) because `order` is built that way.
  std::stable_sort(order.begin(), order.end(), [&](const PredictionRef& a, const PredictionRef& b) {
    return at(a).score > at(b).score;
  });

  std::vector<std::vector<char>> used(per_source.size());
  for (std::size_t s = 0; s < per_source.size(); ++s) used[s].assign(per_source[s].size(), 0);

  std::vector<Cluster> clusters;
  for (const PredictionRef& seed_ref : order) {
    if (used[seed_ref.source][seed_ref.index]) continue;
    used[seed_ref.source][seed_ref.index] = 1;
    const InstancePrediction& seed = at(seed_ref);
    Cluster cluster{seed_ref};
    for (std::size_t s = 0; s < per_source.size(); ++s) {
      if (s == seed_ref.source) continue;
      std::size_t best = per_source[s].size();
      double best_iou = -1.0;
      for (std::size_t i = 0; i < per_source[s].size(); ++i) {
        const auto& cand = per_source[s][i];
        if (used[s][i] || cand.category_id != seed.category_id) continue;
        const double iou = box_iou(seed.bbox, cand.bbox);
        if (iou >= iou_thresh && iou > best_iou) {
          best = i;
          best_iou = iou;
        }
      }
      if (best < per_source[s].size()) {
        used[s][best] = 1;
        cluster.push_back({s, best});
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::vector<InstancePrediction> ensemble_merge(
    const std::vector<std::vector<InstancePrediction>>& per_model, double iou_thresh,
    std::size_t total_models) {
  const std::int64_t image_id = common_image_id(per_model);
  const std::size_t m = total_models == 0 ? per_model.size() : total_models;
  if (m < per_model.size()) {
    throw std::invalid_argument("total_models is smaller than the number of prediction lists");
  }
  std::vector<InstancePrediction> out;
  for (const Cluster& cluster : cluster_predictions(per_model, iou_thresh)) {
    const auto masks = member_masks(per_model, cluster);
    const std::vector<double> no_scores(masks.size(), 0.0);
    ProbabilityMask mean = tta_average(masks, no_scores).mask;
    double score_sum = 0.0;
    for (const auto& ref : cluster) score_sum += per_model[ref.source][ref.index].score;
    const auto& seed = per_model[cluster.front().source][cluster.front().index];
    const BBox box = bbox_of(threshold(mean, kMaskThreshold));
    out.push_back(InstancePrediction{image_id, seed.category_id,
                                     std::clamp(score_sum / static_cast<double>(m), 0.0, 1.0),
                                     box, std::move(mean)});
  }
  return out;
}

std::vector<InstancePrediction> tta_merge(
    const std::vector<std::vector<InstancePrediction>>& per_view, double iou_thresh) {
  const std::int64_t image_id = common_image_id(per_view);
  std::vector<InstancePrediction> out;
  for (const Cluster& cluster : cluster_predictions(per_view, iou_thresh)) {
    const auto masks = member_masks(per_view, cluster);
    std::vector<double> scores;
    for (const auto& ref : cluster) scores.push_back(per_view[ref.source][ref.index].score);
    AveragedMask avg = tta_average(masks, scores);
    const auto& seed = per_view[cluster.front().source][cluster.front().index];
    const BBox box = bbox_of(threshold(avg.mask, kMaskThreshold));
    out.push_back(
        InstancePrediction{image_id, seed.category_id, avg.score, box, std::move(avg.mask)});
  }
  return out;
}

}  // namespace segkit
