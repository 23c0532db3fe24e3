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

#include "segkit/cli/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "segkit/annotations.hpp"
#include "segkit/cli/run_config.hpp"
#include "segkit/coco_eval.hpp"
#include "segkit/components.hpp"
#include "segkit/dataset_stats.hpp"
#include "segkit/disk_benchmark.hpp"
#include "segkit/error.hpp"
#include "segkit/feature_grid.hpp"
#include "segkit/fusion.hpp"
#include "segkit/json_io.hpp"
#include "segkit/parallel.hpp"
#include "segkit/point_head.hpp"
#include "segkit/point_head_trainer.hpp"
#include "segkit/prediction.hpp"
#include "segkit/rle.hpp"
#include "segkit/subdivision.hpp"

namespace segkit::cli {
namespace {

using nlohmann::json;

// Command line contradicts itself or the config.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Args {
  std::string config;
  std::string gt;
  std::vector<std::string> pred;
  std::string out;
  std::string features;
  std::string model;
  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

RunConfig effective_config(const Args& args) {
  RunConfig config = args.config.empty() ? RunConfig{} : load_run_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;
  if (config.threads < 1) throw UsageError("--threads must be >= 1");
  return config;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

AnnotationSet load_annotations(const std::string& path) {
  return load_json_as(path, [](const json& j) { return annotations_from_json(j); });
}

std::vector<InstancePrediction> load_predictions(const std::string& path) {
  return load_json_as(path, [](const json& j) { return predictions_from_json(j); });
}

// Splits per-source prediction lists into per-image groups, images ascending.
std::map<std::int64_t, std::vector<std::vector<InstancePrediction>>> group_by_image(
    std::vector<std::vector<InstancePrediction>> sources) {
  std::map<std::int64_t, std::vector<std::vector<InstancePrediction>>> groups;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (auto& p : sources[s]) {
      auto& slot = groups[p.image_id];
      slot.resize(sources.size());
      slot[s].push_back(std::move(p));
    }
  }
  return groups;
}

template <typename Merge>
std::vector<InstancePrediction> fuse_per_image(
    std::vector<std::vector<InstancePrediction>> sources, int threads, Merge merge) {
  auto groups = group_by_image(std::move(sources));
  std::vector<std::int64_t> ids;
  for (const auto& [id, lists] : groups) ids.push_back(id);
  std::vector<std::vector<InstancePrediction>> fused(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    try {
      fused[i] = merge(groups.at(ids[i]));
    } catch (const DimensionError& e) {
      throw InputError("image " + std::to_string(ids[i]) + ": " + e.what());
    }
  });
  std::vector<InstancePrediction> out;
  for (auto& list : fused) {
    for (auto& p : list) out.push_back(std::move(p));
  }
  return out;
}

int run_stats(const Args& args, std::ostream& out) {
  require(args.gt, "--gt");
  const RunConfig config = effective_config(args);
  const AnnotationSet set = load_annotations(args.gt);
  if (set.instances.empty()) throw InputError(args.gt + ": no annotations to analyse");
  const DatasetStats stats = compute_stats(set, config.anchor_coverage);
  if (!args.out.empty()) write_text_file(args.out, dump_json(stats_to_json(stats)));
  if (!args.csv.empty()) write_text_file(args.csv, stats_to_csv(stats));
  out << format_stats_report(stats);
  return kExitOk;
}

int run_correct(const Args& args, std::ostream& out) {
  require(args.gt, "--gt");
  require(args.out, "--out");
  const RunConfig config = effective_config(args);
  AnnotationSet set = load_annotations(args.gt);
  std::size_t changed = 0;
  std::vector<char> was_changed(set.instances.size(), 0);
  parallel_for(set.instances.size(), config.threads, [&](std::size_t i) {
    auto& inst = set.instances[i];
    const BinaryMask before = rle_decode(inst.mask);
    const BinaryMask after = correct_mask(before, config.correction);
    if (after == before) return;
    was_changed[i] = 1;
    inst = make_instance(inst.id, inst.image_id, inst.category_id, rle_encode(after));
  });
  for (char c : was_changed) changed += c;
  write_text_file(args.out, dump_json(annotations_to_json(set)));
  out << "corrected " << changed << " of " << set.instances.size() << " instances\n";
  return kExitOk;
}

struct CoarseEntry {
  std::int64_t instance_id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  double score = 0.0;
  BBox box;
  int image_width = 0;
  int image_height = 0;
  ProbabilityMask coarse{1, 1};
};

std::vector<CoarseEntry> coarse_from_json(const json& j) {
  if (!j.is_array()) throw InputError("coarse prediction file must hold a JSON list");
  std::vector<CoarseEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      CoarseEntry c;
      c.instance_id = e.at("instance_id").get<std::int64_t>();
      c.image_id = e.at("image_id").get<std::int64_t>();
      c.category_id = e.at("category_id").get<std::int64_t>();
      c.score = e.at("score").get<double>();
      if (!(c.score >= 0.0 && c.score <= 1.0)) throw InputError("score outside [0, 1]");
      const auto box = e.at("bbox").get<std::vector<int>>();
      if (box.size() != 4) throw InputError("bbox must be [x, y, w, h]");
      c.box = BBox{box[0], box[1], box[2], box[3]};
      const auto size = e.at("image_size").get<std::vector<int>>();
      if (size.size() != 2) throw InputError("image_size must be [h, w]");
      c.image_height = size[0];
      c.image_width = size[1];
      if (c.image_width < 1 || c.image_height < 1) throw InputError("empty image_size");
      if (c.box.w < 1 || c.box.h < 1 || c.box.x < 0 || c.box.y < 0 ||
          c.box.x + c.box.w > c.image_width || c.box.y + c.box.h > c.image_height) {
        throw InputError("bbox must be non-empty and inside the image");
      }
      const auto& m = e.at("coarse");
      c.coarse = ProbabilityMask(m.at("width").get<int>(), m.at("height").get<int>(),
                                 m.at("probs").get<std::vector<double>>());
      entries.push_back(std::move(c));
    } catch (const json::exception& ex) {
      throw InputError("entry " + std::to_string(i) + ": " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw InputError("entry " + std::to_string(i) + ": " + ex.what());
    } catch (const Error& ex) {
      throw InputError("entry " + std::to_string(i) + ": " + ex.what());
    }
  }
  return entries;
}

std::map<std::int64_t, FeatureGrid> features_from_json(const json& j) {
  if (!j.is_array()) throw InputError("feature file must hold a JSON list");
  std::map<std::int64_t, FeatureGrid> grids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      const auto id = j[i].at("instance_id").get<std::int64_t>();
      if (!grids.emplace(id, feature_grid_from_json(j[i])).second) {
        throw InputError("duplicate instance_id " + std::to_string(id));
      }
    } catch (const json::exception& ex) {
      throw InputError("grid " + std::to_string(i) + ": " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw InputError("grid " + std::to_string(i) + ": " + ex.what());
    }
  }
  return grids;
}

int run_refine(const Args& args, std::ostream& out) {
  if (args.pred.size() != 1) throw UsageError("refine takes exactly one --pred coarse file");
  require(args.features, "--features");
  require(args.model, "--model");
  require(args.out, "--out");
  const RunConfig config = effective_config(args);
  const SubdivisionConfig& sub = config.subdivision;
  const std::string& coarse_path = args.pred.front();
  const auto entries = load_json_as(coarse_path, coarse_from_json);
  const auto grids = load_json_as(args.features, features_from_json);
  const PointHeadModel model =
      load_json_as(args.model, [](const json& j) { return point_head_from_json(j); });

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string where = coarse_path + ": entry " + std::to_string(i) + ": ";
    if (e.coarse.width() != sub.coarse_size || e.coarse.height() != sub.coarse_size) {
      throw InputError(where + "coarse map is not coarse_size x coarse_size");
    }
    const auto grid = grids.find(e.instance_id);
    if (grid == grids.end()) {
      throw InputError(where + "no feature grid for instance " + std::to_string(e.instance_id));
    }
    if (model.in_dim() != grid->second.channels() + 1) {
      throw InputError(args.model + ": model expects " + std::to_string(model.in_dim() - 1) +
                       " feature channels, instance " + std::to_string(e.instance_id) +
                       " has " + std::to_string(grid->second.channels()));
    }
  }

  std::vector<std::optional<InstancePrediction>> slots(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) {
    const auto& e = entries[i];
    const ProbabilityMask fine =
        subdivision_refine(model, e.coarse, grids.at(e.instance_id), sub);
    const ProbabilityMask in_box = resize_prob(fine, e.box.w, e.box.h);
    BinaryMask mask(e.image_width, e.image_height);
    for (int r = 0; r < e.box.h; ++r) {
      for (int c = 0; c < e.box.w; ++c) {
        mask.set(e.box.y + r, e.box.x + c, in_box.at(r, c) >= sub.threshold);
      }
    }
    slots[i] = InstancePrediction{e.image_id, e.category_id, e.score, bbox_of(mask),
                                  rle_encode(mask)};
  });
  std::vector<InstancePrediction> refined;
  for (auto& p : slots) refined.push_back(std::move(*p));
  sort_by_image(refined);
  write_text_file(args.out, dump_json(predictions_to_json(refined)));
  out << "refined " << refined.size() << " instances\n";
  return kExitOk;
}

int run_tta_fuse(const Args& args, std::ostream& out) {
  if (args.pred.empty()) throw UsageError("tta-fuse needs at least one --pred file");
  require(args.out, "--out");
  const RunConfig config = effective_config(args);
  std::vector<TtaTransform> views = config.tta;
  if (views.empty()) views.assign(args.pred.size(), TtaTransform::identity());
  if (views.size() != args.pred.size()) {
    throw UsageError("tta_transforms lists " + std::to_string(views.size()) +
                     " transforms but " + std::to_string(args.pred.size()) +
                     " --pred files were given");
  }
  std::optional<AnnotationSet> gt;
  if (!args.gt.empty()) gt = load_annotations(args.gt);

  std::vector<std::vector<InstancePrediction>> per_view;
  for (std::size_t v = 0; v < args.pred.size(); ++v) {
    auto preds = load_predictions(args.pred[v]);
    const TtaTransform& t = views[v];
    std::vector<std::optional<InstancePrediction>> aligned(preds.size());
    parallel_for(preds.size(), config.threads, [&](std::size_t i) {
      const auto& p = preds[i];
      int w = mask_width(p);
      int h = mask_height(p);
      if (gt) {
        const ImageInfo* info = gt->find_image(p.image_id);
        if (info == nullptr) {
          throw InputError(args.pred[v] + ": prediction " + std::to_string(i) +
                           ": image " + std::to_string(p.image_id) + " is not in " + args.gt);
        }
        w = info->width;
        h = info->height;
      } else if (t.kind == TtaTransform::Kind::kRescale) {
        w = std::max(1, static_cast<int>(std::lround(w / t.scale)));
        h = std::max(1, static_cast<int>(std::lround(h / t.scale)));
      }
      aligned[i] = invert_prediction(p, t, w, h);
    });
    auto& view = per_view.emplace_back();
    for (auto& p : aligned) view.push_back(std::move(*p));
  }
  auto fused = fuse_per_image(std::move(per_view), config.threads,
                              [&](const std::vector<std::vector<InstancePrediction>>& lists) {
                                return tta_merge(lists, config.ensemble_iou);
                              });
  write_text_file(args.out, dump_json(predictions_to_json(fused)));
  out << "fused " << args.pred.size() << " views into " << fused.size() << " instances\n";
  return kExitOk;
}

int run_ensemble(const Args& args, std::ostream& out) {
  if (args.pred.empty()) throw UsageError("ensemble needs at least one --pred file");
  require(args.out, "--out");
  const RunConfig config = effective_config(args);
  if (config.ensemble_models != 0 && config.ensemble_models < args.pred.size()) {
    throw UsageError("ensemble_models is smaller than the number of --pred files");
  }
  const std::size_t models =
      config.ensemble_models == 0 ? args.pred.size() : config.ensemble_models;
  std::vector<std::vector<InstancePrediction>> per_model;
  for (const auto& path : args.pred) per_model.push_back(load_predictions(path));
  auto fused = fuse_per_image(std::move(per_model), config.threads,
                              [&](const std::vector<std::vector<InstancePrediction>>& lists) {
                                return ensemble_merge(lists, config.ensemble_iou, models);
                              });
  write_text_file(args.out, dump_json(predictions_to_json(fused)));
  out << "merged " << args.pred.size() << " models into " << fused.size() << " instances\n";
  return kExitOk;
}

int run_eval(const Args& args, std::ostream& out) {
  require(args.gt, "--gt");
  if (args.pred.size() != 1) throw UsageError("eval takes exactly one --pred file");
  const RunConfig config = effective_config(args);
  const AnnotationSet gt = load_annotations(args.gt);
  const auto dets = load_predictions(args.pred.front());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const ImageInfo* info = gt.find_image(dets[i].image_id);
    if (info == nullptr) continue;
    if (mask_width(dets[i]) != info->width || mask_height(dets[i]) != info->height) {
      throw InputError(args.pred.front() + ": prediction " + std::to_string(i) +
                       ": mask size differs from image " + std::to_string(info->id));
    }
  }
  EvalParams params;
  params.max_dets_per_image = config.eval_max_dets;
  params.threads = config.threads;
  const EvalResult result = coco_map(gt, dets, params);
  if (!args.out.empty()) write_text_file(args.out, dump_json(eval_result_to_json(result)));
  out << format_eval_table(result);
  return kExitOk;
}

std::string loss_trace_csv(const std::vector<double>& losses) {
  std::string csv = "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, losses[e]);
    csv += buf;
  }
  return csv;
}

int run_train_demo(const Args& args, std::ostream& out) {
  require(args.out, "--out");
  const RunConfig config = effective_config(args);
  DiskBenchmarkConfig bench;
  bench.coarse_size = config.subdivision.coarse_size;
  bench.steps = config.subdivision.steps;
  const auto train = make_disk_dataset(config.train_instances, bench, config.seed);
  const auto test = make_disk_dataset(config.test_instances, bench, config.seed + 1);

  TrainingOptions options = config.training;
  options.loss = config.focal;
  options.seed = config.seed;
  const TrainingResult trained = train_point_head(train, options);
  const RefinementReport report =
      evaluate_refinement(trained.model, test, config.subdivision, config.threads);

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  write_text_file((dir / "model.json").string(), dump_json(point_head_to_json(trained.model)));
  write_text_file((dir / "loss_trace.csv").string(), loss_trace_csv(trained.epoch_loss));
  const json summary = {
      {"seed", config.seed},
      {"train_instances", config.train_instances},
      {"test_instances", config.test_instances},
      {"epochs", options.epochs},
      {"initial_loss", trained.epoch_loss.front()},
      {"final_loss", trained.epoch_loss.back()},
      {"mean_iou_bilinear", report.mean_iou_bilinear},
      {"mean_iou_refined", report.mean_iou_refined},
      {"improvement", report.improvement()},
      {"iou_bilinear", report.iou_bilinear},
      {"iou_refined", report.iou_refined},
  };
  write_text_file((dir / "report.json").string(), dump_json(summary));
  char line[160];
  std::snprintf(line, sizeof line,
                "loss %.4f -> %.4f; held-out mean IoU bilinear %.4f, refined %.4f (%+.4f)\n",
                trained.epoch_loss.front(), trained.epoch_loss.back(), report.mean_iou_bilinear,
                report.mean_iou_refined, report.improvement());
  out << line;
  return kExitOk;
}

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "Run configuration file");
  cmd->add_option("--seed", args.seed, "Override the configured seed");
  cmd->add_option("--threads", args.threads, "Override the configured thread count");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"segkit: instance mask refinement, fusion and evaluation"};
  app.require_subcommand(1);
  Args args;

  auto* stats = app.add_subcommand("stats", "Dataset statistics and anchor recommendation");
  stats->add_option("--gt", args.gt, "Annotation file");
  stats->add_option("--out", args.out, "Write statistics JSON here");
  stats->add_option("--csv", args.csv, "Write histogram CSV here");

  auto* correct = app.add_subcommand("correct", "Remove speckles and fill holes in annotations");
  correct->add_option("--gt", args.gt, "Annotation file");
  correct->add_option("--out", args.out, "Corrected annotation file");

  auto* refine = app.add_subcommand("refine", "Refine coarse masks with a point head");
  refine->add_option("--pred", args.pred, "Coarse prediction file");
  refine->add_option("--features", args.features, "Feature grid file");
  refine->add_option("--model", args.model, "Point head model file");
  refine->add_option("--out", args.out, "Refined prediction file");

  auto* tta = app.add_subcommand("tta-fuse", "Fuse predictions of test-time augmented views");
  tta->add_option("--pred", args.pred, "Prediction file of one view, in tta_transforms order");
  tta->add_option("--gt", args.gt, "Annotation file giving original image sizes");
  tta->add_option("--out", args.out, "Fused prediction file");

  auto* ensemble = app.add_subcommand("ensemble", "Merge predictions of several models");
  ensemble->add_option("--pred", args.pred, "Prediction file of one model");
  ensemble->add_option("--out", args.out, "Merged prediction file");

  auto* eval = app.add_subcommand("eval", "Mask AP against ground truth");
  eval->add_option("--gt", args.gt, "Annotation file");
  eval->add_option("--pred", args.pred, "Prediction file");
  eval->add_option("--out", args.out, "Write the result JSON here");

  auto* demo = app.add_subcommand("train-demo", "Train and evaluate on synthetic disks");
  demo->add_option("--out", args.out, "Output directory");

  for (auto* cmd : {stats, correct, refine, tta, ensemble, eval, demo}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return run_stats(args, out);
    if (correct->parsed()) return run_correct(args, out);
    if (refine->parsed()) return run_refine(args, out);
    if (tta->parsed()) return run_tta_fuse(args, out);
    if (ensemble->parsed()) return run_ensemble(args, out);
    if (eval->parsed()) return run_eval(args, out);
    return run_train_demo(args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"segkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace segkit::cli
