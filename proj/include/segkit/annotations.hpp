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

#ifndef SEGKIT_ANNOTATIONS_HPP_
#define SEGKIT_ANNOTATIONS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "segkit/rle.hpp"

namespace segkit {

struct ImageInfo {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct CategoryInfo {
  std::int64_t id = 0;
  std::string name;

  friend bool operator==(const CategoryInfo&, const CategoryInfo&) = default;
};

struct GroundTruthInstance {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  Rle mask;
  std::uint64_t area = 0;  // foreground pixels of `mask`

  friend bool operator==(const GroundTruthInstance&, const GroundTruthInstance&) = default;
};

GroundTruthInstance make_instance(std::int64_t id, std::int64_t image_id,
                                  std::int64_t category_id, Rle mask);

struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<GroundTruthInstance> instances;
  std::vector<CategoryInfo> categories;

  // Throws InputError on duplicate ids, dangling references, or masks whose
  // size differs from their image.
  void validate() const;
  const ImageInfo* find_image(std::int64_t id) const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

// COCO-style {"images": [{id, width, height}],
//             "annotations": [{id, image_id, category_id, segmentation, area}],
//             "categories": [{id, name}]}
// The "area" field is recomputed from the mask on read.
nlohmann::json annotations_to_json(const AnnotationSet& set);
AnnotationSet annotations_from_json(const nlohmann::json& j);

}  // namespace segkit

#endif  // SEGKIT_ANNOTATIONS_HPP_
