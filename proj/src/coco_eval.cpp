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

#include "segkit/coco_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "segkit/error.hpp"
#include "segkit/parallel.hpp"

namespace segkit {
namespace {

struct ScoredDet {
  std::size_t input_index;
  double score;
  Rle mask;
  double area;
};

struct ScoredOutcome {
  double score;
  std::size_t input_index;
  MatchOutcome outcome;
};

// ap[range][threshold] of one category; kNoGroundTruth where it has none.
using CategoryTable = std::vector<std::vector<double>>;

bool before(double score_a, std::size_t idx_a, double score_b, std::size_t idx_b) {
  return score_a > score_b || (score_a == score_b && idx_a < idx_b);
}

CategoryTable evaluate_category(const std::vector<std::vector<const GroundTruthInstance*>>& gts,
                                const std::vector<std::vector<const ScoredDet*>>& dets,
                                const EvalParams& params) {
  const std::size_t num_t = params.iou_thresholds.size();
  std::vector<std::vector<std::vector<ScoredOutcome>>> outcomes(
      kAreaRangeCount, std::vector<std::vector<ScoredOutcome>>(num_t));
  std::vector<std::size_t> num_gt(kAreaRangeCount, 0);

  for (std::size_t img = 0; img < gts.size(); ++img) {
    const auto& g = gts[img];
    const auto& d = dets[img];
    if (g.empty() && d.empty()) continue;
    std::vector<double> ious(d.size() * g.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        ious[i * g.size() + j] = rle_iou(d[i]->mask, g[j]->mask);
      }
    }
    for (std::size_t a = 0; a < kAreaRangeCount; ++a) {
      const auto range = static_cast<AreaRange>(a);
      std::vector<char> gt_ignored(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) {
        gt_ignored[j] = !in_area_range(static_cast<double>(g[j]->area), range, params);
        if (!gt_ignored[j]) ++num_gt[a];
      }
      std::vector<char> det_ignored(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        det_ignored[i] = !in_area_range(d[i]->area, range, params);
      }
      for (std::size_t t = 0; t < num_t; ++t) {
        const auto flags =
            match_with_ignore(ious, d.size(), gt_ignored, det_ignored, params.iou_thresholds[t]);
        for (std::size_t i = 0; i < d.size(); ++i) {
          if (flags[i] == MatchOutcome::kIgnored) continue;
          outcomes[a][t].push_back({d[i]->score, d[i]->input_index, flags[i]});
        }
      }
    }
  }

  CategoryTable table(kAreaRangeCount, std::vector<double>(num_t, kNoGroundTruth));
  for (std::size_t a = 0; a < kAreaRangeCount; ++a) {
    for (std::size_t t = 0; t < num_t; ++t) {
      auto& list = outcomes[a][t];
      std::sort(list.begin(), list.end(), [](const ScoredOutcome& x, const ScoredOutcome& y) {
        return before(x.score, x.input_index, y.score, y.input_index);
      });
      std::vector<bool> tp(list.size());
      for (std::size_t i = 0; i < list.size(); ++i) {
        tp[i] = list[i].outcome == MatchOutcome::kTruePositive;
      }
      table[a][t] = average_precision(tp, num_gt[a]);
    }
  }
  return table;
}

// Mean of the non-sentinel entries, or the sentinel if there are none.
double mean_present(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (v < 0.0) continue;
    sum += v;
    ++n;
  }
  return n == 0 ? kNoGroundTruth : sum / static_cast<double>(n);
}

std::ptrdiff_t threshold_index(const std::vector<double>& thresholds, double value) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - value) < 1e-9) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

}  // namespace

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

bool in_area_range(double area, AreaRange range, const EvalParams& params) {
  switch (range) {
    case AreaRange::kAll:
      return true;
    case AreaRange::kSmall:
      return area < params.small_area_max;
    case AreaRange::kMedium:
      return area >= params.small_area_max && area <= params.large_area_min;
    case AreaRange::kLarge:
      return area > params.large_area_min;
  }
  return false;
}

std::vector<MatchOutcome> match_with_ignore(std::span<const double> ious, std::size_t num_dets,
                                            std::span<const char> gt_ignored,
                                            std::span<const char> det_ignored,
                                            double iou_thresh) {
  const std::size_t num_gts = gt_ignored.size();
  std::vector<char> matched(num_gts, 0);
  std::vector<MatchOutcome> out(num_dets, MatchOutcome::kFalsePositive);
  for (std::size_t d = 0; d < num_dets; ++d) {
    // Pass 0 looks at regular ground truths, pass 1 at ignored ones.
    for (int pass = 0; pass < 2; ++pass) {
      std::size_t best = num_gts;
      double best_iou = iou_thresh;
      for (std::size_t g = 0; g < num_gts; ++g) {
        if (matched[g] || (gt_ignored[g] != 0) != (pass == 1)) continue;
        const double iou = ious[d * num_gts + g];
        if (iou >= best_iou && (best == num_gts || iou > best_iou)) {
          best = g;
          best_iou = iou;
        }
      }
      if (best < num_gts) {
        matched[best] = 1;
        out[d] = pass == 0 ? MatchOutcome::kTruePositive : MatchOutcome::kIgnored;
        break;
      }
    }
    if (out[d] == MatchOutcome::kFalsePositive && !det_ignored.empty() && det_ignored[d]) {
      out[d] = MatchOutcome::kIgnored;
    }
  }
  return out;
}

std::vector<bool> match_detections(std::span<const Rle> dets, std::span<const Rle> gts,
                                   double iou_thresh) {
  std::vector<double> ious(dets.size() * gts.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) ious[i * gts.size() + j] = rle_iou(dets[i], gts[j]);
  }
  const std::vector<char> none(gts.size(), 0);
  const auto outcomes = match_with_ignore(ious, dets.size(), none, {}, iou_thresh);
  std::vector<bool> tp(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    tp[i] = outcomes[i] == MatchOutcome::kTruePositive;
  }
  return tp;
}

double average_precision(const std::vector<bool>& true_positive, std::size_t num_gt) {
  if (num_gt == 0) return kNoGroundTruth;
  const std::size_t n = true_positive.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += true_positive[i] ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  // Running maximum from the right: best precision at any later rank.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  std::size_t k = 0;
  for (int level = 0; level <= 100; ++level) {
    const double r = level / 100.0;
    while (k < n && recall[k] < r) ++k;
    if (k == n) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

EvalResult coco_map(const AnnotationSet& gt, std::span<const InstancePrediction> dets,
                    const EvalParams& params) {
  EvalResult result;

  std::vector<std::int64_t> image_ids;
  for (const auto& img : gt.images) image_ids.push_back(img.id);
  std::sort(image_ids.begin(), image_ids.end());
  std::map<std::int64_t, std::size_t> image_slot;
  for (std::size_t i = 0; i < image_ids.size(); ++i) image_slot[image_ids[i]] = i;

  std::vector<CategoryInfo> categories = gt.categories;
  std::sort(categories.begin(), categories.end(),
            [](const CategoryInfo& a, const CategoryInfo& b) { return a.id < b.id; });
  std::map<std::int64_t, std::size_t> category_slot;
  for (std::size_t k = 0; k < categories.size(); ++k) category_slot[categories[k].id] = k;

  // Keep the top max_dets_per_image detections of every image.
  std::vector<std::vector<ScoredDet>> per_image(image_ids.size());
  std::vector<std::vector<std::int64_t>> per_image_category(image_ids.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto& d = dets[i];
    const auto img = image_slot.find(d.image_id);
    if (img == image_slot.end() || !category_slot.count(d.category_id)) {
      ++result.ignored_detections;
      continue;
    }
    const ImageInfo* info = gt.find_image(d.image_id);
    if (mask_width(d) != info->width || mask_height(d) != info->height) {
      throw DimensionError("detection " + std::to_string(i) + " mask size differs from image " +
                           std::to_string(d.image_id));
    }
    Rle mask = rle_of(d);
    const double area = static_cast<double>(mask.area());
    per_image[img->second].push_back(ScoredDet{i, d.score, std::move(mask), area});
    per_image_category[img->second].push_back(d.category_id);
  }
  // Grid of [category][image] pointers.
  const std::size_t num_k = categories.size();
  const std::size_t num_i = image_ids.size();
  std::vector<std::vector<std::vector<const ScoredDet*>>> det_grid(
      num_k, std::vector<std::vector<const ScoredDet*>>(num_i));
  for (std::size_t img = 0; img < num_i; ++img) {
    auto& list = per_image[img];
    std::vector<std::size_t> order(list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return before(list[a].score, list[a].input_index, list[b].score, list[b].input_index);
    });
    if (order.size() > params.max_dets_per_image) order.resize(params.max_dets_per_image);
    for (std::size_t idx : order) {
      det_grid[category_slot[per_image_category[img][idx]]][img].push_back(&list[idx]);
    }
  }
  std::vector<std::vector<std::vector<const GroundTruthInstance*>>> gt_grid(
      num_k, std::vector<std::vector<const GroundTruthInstance*>>(num_i));
  for (const auto& inst : gt.instances) {
    gt_grid[category_slot.at(inst.category_id)][image_slot.at(inst.image_id)].push_back(&inst);
  }

  std::vector<CategoryTable> tables(num_k);
  parallel_for(num_k, params.threads, [&](std::size_t k) {
    tables[k] = evaluate_category(gt_grid[k], det_grid[k], params);
  });

  const std::size_t num_t = params.iou_thresholds.size();
  auto summarize = [&](AreaRange range, std::ptrdiff_t only_t) {
    std::vector<double> values;
    for (const auto& table : tables) {
      for (std::size_t t = 0; t < num_t; ++t) {
        if (only_t >= 0 && static_cast<std::size_t>(only_t) != t) continue;
        values.push_back(table[static_cast<std::size_t>(range)][t]);
      }
    }
    return mean_present(values);
  };
  result.map = summarize(AreaRange::kAll, -1);
  const auto t50 = threshold_index(params.iou_thresholds, 0.5);
  const auto t75 = threshold_index(params.iou_thresholds, 0.75);
  if (t50 >= 0) result.ap50 = summarize(AreaRange::kAll, t50);
  if (t75 >= 0) result.ap75 = summarize(AreaRange::kAll, t75);
  result.ap_small = summarize(AreaRange::kSmall, -1);
  result.ap_medium = summarize(AreaRange::kMedium, -1);
  result.ap_large = summarize(AreaRange::kLarge, -1);
  for (std::size_t k = 0; k < num_k; ++k) {
    result.per_category.push_back(CategoryAp{categories[k].id, categories[k].name,
                                             mean_present(tables[k][0])});
  }
  return result;
}

nlohmann::json eval_result_to_json(const EvalResult& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& c : r.per_category) {
    per.push_back({{"category_id", c.category_id}, {"name", c.name}, {"ap", c.ap}});
  }
  return nlohmann::json{{"mAP", r.map},
                        {"AP50", r.ap50},
                        {"AP75", r.ap75},
                        {"APs", r.ap_small},
                        {"APm", r.ap_medium},
                        {"APl", r.ap_large},
                        {"per_category", per},
                        {"ignored_detections", r.ignored_detections}};
}

EvalResult eval_result_from_json(const nlohmann::json& j) {
  try {
    EvalResult r;
    r.map = j.at("mAP").get<double>();
    r.ap50 = j.at("AP50").get<double>();
    r.ap75 = j.at("AP75").get<double>();
    r.ap_small = j.at("APs").get<double>();
    r.ap_medium = j.at("APm").get<double>();
    r.ap_large = j.at("APl").get<double>();
    for (const auto& c : j.at("per_category")) {
      r.per_category.push_back(CategoryAp{c.at("category_id").get<std::int64_t>(),
                                          c.at("name").get<std::string>(),
                                          c.at("ap").get<double>()});
    }
    r.ignored_detections = j.at("ignored_detections").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("eval result: ") + e.what());
  }
}

std::string format_eval_table(const EvalResult& r) {
  auto cell = [](double v) {
    char buf[32];
    if (v < 0.0) {
      std::snprintf(buf, sizeof(buf), "%8s", "n/a");
    } else {
      std::snprintf(buf, sizeof(buf), "%8.4f", v);
    }
    return std::string(buf);
  };
  std::ostringstream os;
  os << "    mAP     AP50     AP75      APs      APm      APl\n";
  os << cell(r.map) << ' ' << cell(r.ap50) << ' ' << cell(r.ap75) << ' ' << cell(r.ap_small)
     << ' ' << cell(r.ap_medium) << ' ' << cell(r.ap_large) << '\n';
  if (!r.per_category.empty()) {
    std::size_t name_width = 8;
    for (const auto& c : r.per_category) name_width = std::max(name_width, c.name.size());
    os << '\n';
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%10s  %-*s  %8s\n", "category", static_cast<int>(name_width),
                  "name", "AP");
    os << buf;
    for (const auto& c : r.per_category) {
      std::snprintf(buf, sizeof(buf), "%10lld  %-*s  %s\n", static_cast<long long>(c.category_id),
                    static_cast<int>(name_width), c.name.c_str(), cell(c.ap).c_str());
      os << buf;
    }
  }
  if (r.ignored_detections > 0) {
    os << "\nignored detections (unknown image or category): " << r.ignored_detections << '\n';
  }
  return os.str();
}

}  // namespace segkit
