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

#include "segkit/annotations.hpp"

#include <set>

#include "segkit/error.hpp"

namespace segkit {

GroundTruthInstance make_instance(std::int64_t id, std::int64_t image_id,
                                  std::int64_t category_id, Rle mask) {
  const std::uint64_t area = mask.area();
  return GroundTruthInstance{id, image_id, category_id, std::move(mask), area};
}

const ImageInfo* AnnotationSet::find_image(std::int64_t id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

void AnnotationSet::validate() const {
  std::set<std::int64_t> image_ids, category_ids, instance_ids;
  for (const auto& img : images) {
    if (img.width < 1 || img.height < 1) {
      throw InputError("image " + std::to_string(img.id) + " has non-positive size");
    }
    if (!image_ids.insert(img.id).second) {
      throw InputError("duplicate image id " + std::to_string(img.id));
    }
  }
  for (const auto& cat : categories) {
    if (!category_ids.insert(cat.id).second) {
      throw InputError("duplicate category id " + std::to_string(cat.id));
    }
  }
  for (const auto& inst : instances) {
    const std::string where = "annotation " + std::to_string(inst.id);
    if (!instance_ids.insert(inst.id).second) throw InputError("duplicate " + where);
    if (!category_ids.count(inst.category_id)) {
      throw InputError(where + " references unknown category " +
                       std::to_string(inst.category_id));
    }
    const ImageInfo* img = find_image(inst.image_id);
    if (img == nullptr) {
      throw InputError(where + " references unknown image " + std::to_string(inst.image_id));
    }
    if (img->width != inst.mask.width() || img->height != inst.mask.height()) {
      throw InputError(where + " mask size differs from its image");
    }
    if (inst.area != inst.mask.area()) throw InputError(where + " area disagrees with its mask");
  }
}

nlohmann::json annotations_to_json(const AnnotationSet& set) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& img : set.images) {
    images.push_back({{"id", img.id}, {"width", img.width}, {"height", img.height}});
  }
  nlohmann::json anns = nlohmann::json::array();
  for (const auto& inst : set.instances) {
    anns.push_back({{"id", inst.id},
                    {"image_id", inst.image_id},
                    {"category_id", inst.category_id},
                    {"segmentation", rle_to_json(inst.mask)},
                    {"area", inst.area}});
  }
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& cat : set.categories) cats.push_back({{"id", cat.id}, {"name", cat.name}});
  return nlohmann::json{{"images", images}, {"annotations", anns}, {"categories", cats}};
}

AnnotationSet annotations_from_json(const nlohmann::json& j) {
  AnnotationSet set;
  std::string where = "annotation file";
  try {
    for (const auto& img : j.at("images")) {
      set.images.push_back(ImageInfo{img.at("id").get<std::int64_t>(),
                                     img.at("width").get<int>(), img.at("height").get<int>()});
    }
    for (const auto& cat : j.at("categories")) {
      set.categories.push_back(
          CategoryInfo{cat.at("id").get<std::int64_t>(), cat.value("name", std::string{})});
    }
    const auto& anns = j.at("annotations");
    for (std::size_t i = 0; i < anns.size(); ++i) {
      where = "annotation " + std::to_string(i);
      const auto& a = anns[i];
      set.instances.push_back(make_instance(a.at("id").get<std::int64_t>(),
                                            a.at("image_id").get<std::int64_t>(),
                                            a.at("category_id").get<std::int64_t>(),
                                            rle_from_json(a.at("segmentation"))));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const CodecError& e) {
    throw InputError(where + ": " + e.what());
  }
  set.validate();
  return set;
}

}  // namespace segkit
