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

#include "segkit/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "segkit/error.hpp"

namespace segkit {

int mask_width(const InstancePrediction& pred) {
  return std::visit([](const auto& m) { return m.width(); }, pred.mask);
}

int mask_height(const InstancePrediction& pred) {
  return std::visit([](const auto& m) { return m.height(); }, pred.mask);
}

ProbabilityMask probability_of(const InstancePrediction& pred) {
  if (const auto* prob = std::get_if<ProbabilityMask>(&pred.mask)) return *prob;
  return to_probability(rle_decode(std::get<Rle>(pred.mask)));
}

Rle rle_of(const InstancePrediction& pred) {
  if (const auto* rle = std::get_if<Rle>(&pred.mask)) return *rle;
  return rle_encode(threshold(std::get<ProbabilityMask>(pred.mask), kMaskThreshold));
}

nlohmann::json predictions_to_json(const std::vector<InstancePrediction>& preds) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : preds) {
    const Rle rle = rle_of(p);
    const BBox box = bbox_of(rle_decode(rle));
    out.push_back({{"image_id", p.image_id},
                   {"category_id", p.category_id},
                   {"score", p.score},
                   {"bbox", {box.x, box.y, box.w, box.h}},
                   {"segmentation", rle_to_json(rle)}});
  }
  return out;
}

std::vector<InstancePrediction> predictions_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("prediction file must hold a JSON list");
  std::vector<InstancePrediction> preds;
  preds.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      const double score = e.at("score").get<double>();
      if (!(score >= 0.0 && score <= 1.0)) throw InputError("score outside [0, 1]");
      Rle rle = rle_from_json(e.at("segmentation"));
      const BBox box = bbox_of(rle_decode(rle));
      preds.push_back(InstancePrediction{e.at("image_id").get<std::int64_t>(),
                                         e.at("category_id").get<std::int64_t>(), score, box,
                                         std::move(rle)});
    } catch (const nlohmann::json::exception& ex) {
      throw InputError("prediction " + std::to_string(i) + ": " + ex.what());
    } catch (const Error& ex) {
      throw InputError("prediction " + std::to_string(i) + ": " + ex.what());
    }
  }
  return preds;
}

void sort_by_image(std::vector<InstancePrediction>& preds) {
  std::stable_sort(preds.begin(), preds.end(),
                   [](const InstancePrediction& a, const InstancePrediction& b) {
                     return a.image_id < b.image_id;
                   });
}

}  // namespace segkit
