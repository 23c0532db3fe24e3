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

// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// value, tolerance and wall time against a fixed budget. Exits non-zero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "segkit/cli/dispatch.hpp"
#include "segkit/coco_eval.hpp"
#include "segkit/components.hpp"
#include "segkit/disk_benchmark.hpp"
#include "segkit/focal_loss.hpp"
#include "segkit/fusion.hpp"
#include "segkit/point_head.hpp"
#include "segkit/point_head_trainer.hpp"
#include "segkit/rle.hpp"
#include "segkit/rng.hpp"
#include "support/oracles.hpp"

namespace {

using namespace segkit;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- codec

Outcome codec_exactness() {
  Rng rng(1001);
  std::size_t roundtrip_fail = 0, string_fail = 0, reference_fail = 0;
  const int kMasks = 1000;
  for (int i = 0; i < kMasks; ++i) {
    const int w = 1 + static_cast<int>(rng.index(64));
    const int h = 1 + static_cast<int>(rng.index(64));
    const BinaryMask m = testing::random_mask(rng, w, h, rng.uniform());
    const Rle r = rle_encode(m);
    if (!(rle_decode(r) == m)) ++roundtrip_fail;
    if (!(rle_from_string(rle_to_string(r), w, h) == r)) ++string_fail;
  }
  const int kReference = 20;
  for (int i = 0; i < kReference; ++i) {
    const int w = 1 + static_cast<int>(rng.index(64));
    const int h = 1 + static_cast<int>(rng.index(64));
    const BinaryMask m = testing::random_mask(rng, w, h, rng.uniform());
    if (rle_to_string(rle_encode(m)) != testing::reference_rle_string(m)) ++reference_fail;
  }
  return {roundtrip_fail + string_fail + reference_fail == 0,
          std::to_string(kMasks) + " masks: " + std::to_string(roundtrip_fail) +
              " round-trip, " + std::to_string(string_fail) + " string mismatches; " +
              std::to_string(kReference) + " reference cases: " + std::to_string(reference_fail) +
              " mismatches"};
}

// ---------------------------------------------------------------- losses

double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max(std::max(std::abs(a), std::abs(b)), floor);
}

Outcome focal_loss_suite() {
  Rng rng(1002);
  FocalLossParams ce;
  ce.gamma = 0.0;
  ce.alpha = {1.0};
  double ce_diff = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform(1e-6, 1.0 - 1e-6);
    const int t = static_cast<int>(rng.index(2));
    ce_diff = std::max(ce_diff, std::abs(focal_binary(p, t, ce) + std::log(t ? p : 1.0 - p)));
  }
  FocalLossParams fl;
  fl.gamma = 2.0;
  fl.alpha = {1.0};
  const double hand = std::abs(focal_binary(0.5, 1, fl) - 0.25 * std::log(2.0));

  double direct = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform(0.01, 0.99);
    const int t = static_cast<int>(rng.index(2));
    FocalLossParams prm;
    prm.gamma = static_cast<double>(rng.index(4));
    prm.alpha = {1.0};
    const double h = 1e-6;
    const double fd = (focal_binary(p + h, t, prm) - focal_binary(p - h, t, prm)) / (2 * h);
    direct = std::max(direct, rel_err(fd, focal_binary_grad(p, t, prm), 1e-3));
  }

  // Through the point head: every parameter of small random models.
  double chain = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    PointHeadModel model = PointHeadModel::random(4, {8, 8}, 2000 + trial);
    std::vector<std::vector<double>> feats;
    std::vector<double> coarse;
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) {
      feats.push_back({rng.normal(), rng.normal(), rng.normal()});
      coarse.push_back(rng.uniform());
      labels.push_back(static_cast<int>(rng.index(2)));
    }
    const auto batch_loss = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < feats.size(); ++i) {
        s += point_loss(model, feats[i], coarse[i], labels[i], fl);
      }
      return s / static_cast<double>(feats.size());
    };
    std::vector<DenseLayer> grad = model.layers();
    for (auto& g : grad) {
      std::fill(g.weights.begin(), g.weights.end(), 0.0);
      std::fill(g.bias.begin(), g.bias.end(), 0.0);
    }
    for (std::size_t i = 0; i < feats.size(); ++i) {
      point_loss_backward(model, feats[i], coarse[i], labels[i], fl,
                          1.0 / static_cast<double>(feats.size()), grad);
    }
    auto& layers = model.mutable_layers();
    const double h = 1e-4;
    const auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double keep = params[k];
        params[k] = keep + h;
        const double up = batch_loss();
        params[k] = keep - h;
        const double down = batch_loss();
        params[k] = keep;
        chain = std::max(chain, rel_err((up - down) / (2 * h), analytic[k], 1e-6));
      }
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
      check(layers[l].weights, grad[l].weights);
      check(layers[l].bias, grad[l].bias);
    }
  }
  const bool pass = ce_diff < 1e-12 && hand < 1e-12 && direct < 1e-6 && chain < 1e-4;
  return {pass, "CE diff " + fmt("%.1e", ce_diff) + " (<1e-12), 0.25 ln2 diff " +
                    fmt("%.1e", hand) + " (<1e-12), grad rel err " + fmt("%.1e", direct) +
                    " (<1e-6), chain " + fmt("%.1e", chain) + " (<1e-4)"};
}

// ---------------------------------------------------------------- evaluator

double max_result_diff(const EvalResult& a, const EvalResult& b) {
  double d = 0.0;
  for (auto [x, y] : {std::pair{a.map, b.map}, {a.ap50, b.ap50}, {a.ap75, b.ap75},
                      {a.ap_small, b.ap_small}, {a.ap_medium, b.ap_medium},
                      {a.ap_large, b.ap_large}}) {
    d = std::max(d, std::abs(x - y));
  }
  if (a.per_category.size() != b.per_category.size()) return INFINITY;
  for (std::size_t k = 0; k < a.per_category.size(); ++k) {
    d = std::max(d, std::abs(a.per_category[k].ap - b.per_category[k].ap));
  }
  if (a.ignored_detections != b.ignored_detections) return INFINITY;
  return d;
}

Outcome evaluator_oracle() {
  Rng rng(1003);
  const int kScenes = 250;
  double worst = 0.0;
  int perfect_scenes = 0, perfect_fail = 0;
  for (int s = 0; s < kScenes; ++s) {
    const auto scene = testing::random_eval_scene(rng);
    EvalParams p;
    p.small_area_max = 4.0 + static_cast<double>(rng.index(20));
    p.large_area_min = p.small_area_max + static_cast<double>(rng.index(40));
    p.max_dets_per_image = 3 + rng.index(10);
    worst = std::max(worst, max_result_diff(coco_map(scene.gt, scene.dets, p),
                                            testing::brute_force_eval(scene.gt, scene.dets, p)));
    if (scene.gt.instances.empty()) continue;
    const auto perfect = coco_map(scene.gt, testing::perfect_detections(scene.gt));
    ++perfect_scenes;
    for (double v : {perfect.map, perfect.ap50, perfect.ap75}) {
      if (v != 1.0) ++perfect_fail;
    }
  }
  return {worst < 1e-9 && perfect_fail == 0 && perfect_scenes > 0,
          std::to_string(kScenes) + " scenes, max diff " + fmt("%.1e", worst) + " (<1e-9); " +
              std::to_string(perfect_scenes) + " perfect scenes, " +
              std::to_string(perfect_fail) + " not exactly 1.0"};
}

// ---------------------------------------------------------------- refinement

Outcome refinement_benchmark() {
  DiskBenchmarkConfig bench;
  const SubdivisionConfig sub;
  bench.coarse_size = sub.coarse_size;
  bench.steps = sub.steps;
  const std::size_t kTrain = 120, kTest = 64;
  const auto train = make_disk_dataset(kTrain, bench, 42);
  const auto test = make_disk_dataset(kTest, bench, 43);
  TrainingOptions options;
  options.seed = 42;
  const TrainingResult trained = train_point_head(train, options);
  const RefinementReport report = evaluate_refinement(trained.model, test, sub, 1);
  const double initial = trained.epoch_loss.front();
  const double final_loss = trained.epoch_loss.back();
  const bool pass = kTest >= 50 && report.improvement() >= 0.03 && final_loss < initial;
  return {pass, std::to_string(kTest) + " held-out disks, mean IoU bilinear " +
                    fmt("%.4f", report.mean_iou_bilinear) + " -> refined " +
                    fmt("%.4f", report.mean_iou_refined) + " (" +
                    fmt("%+.4f", report.improvement()) + ", need >= +0.03); loss " +
                    fmt("%.4f", initial) + " -> " + fmt("%.4f", final_loss)};
}

// ---------------------------------------------------------------- correction

struct CorruptedCase {
  BinaryMask clean;
  BinaryMask corrupted;
};

bool all_equal(const BinaryMask& m, int r0, int c0, int r1, int c1, bool value) {
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (r < 0 || c < 0 || r >= m.height() || c >= m.width()) return false;
      if (m.at(r, c) != value) return false;
    }
  }
  return true;
}

// An ellipse blob plus small rectangular holes strictly inside it and small
// rectangular speckles with a background ring around them. Each defect is
// below 4% of the blob's remaining area.
CorruptedCase make_corrupted(Rng& rng) {
  const int w = 64, h = 64;
  const double cx = rng.uniform(24, 40), cy = rng.uniform(24, 40);
  const double rx = rng.uniform(9, 18), ry = rng.uniform(9, 18);
  BinaryMask clean(w, h);
  std::size_t area = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double dx = (c - cx) / rx, dy = (r - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) {
        clean.set(r, c, true);
        ++area;
      }
    }
  }
  const std::size_t limit = area * 4 / 100;
  BinaryMask m = clean;
  const int holes = 1 + static_cast<int>(rng.index(3));
  std::size_t removed = 0;
  for (int k = 0, tries = 0; k < holes && tries < 500; ++tries) {
    const int hw = 1 + static_cast<int>(rng.index(3)), hh = 1 + static_cast<int>(rng.index(3));
    const int r0 = static_cast<int>(rng.index(h)), c0 = static_cast<int>(rng.index(w));
    const auto size = static_cast<std::size_t>(hw * hh);
    if (size * 100 >= (area - removed - size) * 4) continue;
    // The hole plus a one-pixel ring must be solid foreground.
    if (!all_equal(m, r0 - 1, c0 - 1, r0 + hh, c0 + hw, true)) continue;
    for (int r = r0; r < r0 + hh; ++r) {
      for (int c = c0; c < c0 + hw; ++c) m.set(r, c, false);
    }
    removed += size;
    ++k;
  }
  const int speckles = 1 + static_cast<int>(rng.index(4));
  for (int k = 0, tries = 0; k < speckles && tries < 500; ++tries) {
    const int sw = 1 + static_cast<int>(rng.index(3)), sh = 1 + static_cast<int>(rng.index(3));
    const int r0 = static_cast<int>(rng.index(h)), c0 = static_cast<int>(rng.index(w));
    if (static_cast<std::size_t>(sw * sh) > limit) continue;
    if (!all_equal(m, r0 - 1, c0 - 1, r0 + sh, c0 + sw, false)) continue;
    for (int r = r0; r < r0 + sh; ++r) {
      for (int c = c0; c < c0 + sw; ++c) m.set(r, c, true);
    }
    ++k;
  }
  return {clean, m};
}

Outcome mask_correction() {
  Rng rng(1005);
  const int kCases = 100;
  int restored = 0, idempotent = 0, clean_fixed = 0, changed = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto c = make_corrupted(rng);
    if (!(c.corrupted == c.clean)) ++changed;
    const BinaryMask fixed = correct_mask(c.corrupted);
    if (fixed == c.clean) ++restored;
    if (correct_mask(fixed) == fixed) ++idempotent;
    if (correct_mask(c.clean) == c.clean) ++clean_fixed;
  }
  const bool pass = changed == kCases && restored == kCases && idempotent == kCases &&
                    clean_fixed == kCases;
  return {pass, std::to_string(restored) + "/" + std::to_string(kCases) + " restored exactly, " +
                    std::to_string(idempotent) + "/" + std::to_string(kCases) + " idempotent, " +
                    std::to_string(clean_fixed) + "/" + std::to_string(kCases) +
                    " clean masks unchanged (" + std::to_string(changed) + " actually corrupted)"};
}

// ---------------------------------------------------------------- fusion

ProbabilityMask random_prob(Rng& rng, int w, int h) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (double& x : v) x = rng.uniform();
  return ProbabilityMask(w, h, v);
}

ProbabilityMask soft_box(int w, int h, const BBox& b) {
  ProbabilityMask m(w, h, 0.1);
  for (int r = b.y; r < b.y + b.h; ++r) {
    for (int c = b.x; c < b.x + b.w; ++c) m.set(r, c, 0.9);
  }
  return m;
}

Outcome fusion_suite() {
  Rng rng(1006);
  int failures = 0;
  const int kTrials = 200;
  const auto flip = TtaTransform::horizontal_flip();
  for (int i = 0; i < kTrials; ++i) {
    const int w = 1 + static_cast<int>(rng.index(40)), h = 1 + static_cast<int>(rng.index(40));
    const ProbabilityMask m = random_prob(rng, w, h);
    if (!(apply_transform(apply_transform(m, flip), flip) == m)) ++failures;
    const std::vector<ProbabilityMask> same(1 + rng.index(6), m);
    const std::vector<double> scores(same.size(), 0.37);
    const auto avg = tta_average(same, scores);
    if (!(avg.mask == m) || avg.score != 0.37) ++failures;

    std::vector<InstancePrediction> preds;
    for (int k = 0; k < 4; ++k) {
      const BBox b{10 * k, static_cast<int>(rng.index(10)), 6, 6};
      preds.push_back(InstancePrediction{1, 1, rng.uniform(), b, soft_box(40, 20, b)});
    }
    const auto single = ensemble_merge({preds}, 0.5, 1);
    if (single.size() != preds.size()) {
      ++failures;
      continue;
    }
    for (const auto& out : single) {
      bool found = false;
      for (const auto& in : preds) {
        found = found || (in.score == out.score && in.bbox == out.bbox &&
                          std::get<ProbabilityMask>(in.mask) == std::get<ProbabilityMask>(out.mask));
      }
      if (!found) ++failures;
    }
  }
  const BBox b{4, 4, 10, 10};
  const auto vote = ensemble_merge({{InstancePrediction{1, 1, 0.8, b, soft_box(32, 32, b)}},
                                    {InstancePrediction{1, 1, 0.6, b, soft_box(32, 32, b)}}});
  const bool vote_ok = vote.size() == 1 && vote[0].score == (0.8 + 0.6) / 2 &&
                       std::abs(vote[0].score - 0.7) <= 1e-15;
  return {failures == 0 && vote_ok,
          std::to_string(kTrials) + " trials of flip involution, TTA idempotence and single-model " +
              "passthrough: " + std::to_string(failures) + " failures; soft vote (0.8, 0.6) -> " +
              (vote.empty() ? std::string("none") : fmt("%.17g", vote[0].score))};
}

// ---------------------------------------------------------------- cli

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> run_cli(const fs::path& dir, int threads, int& failures) {
  const std::string fx = SEGKIT_FIXTURE_DIR;
  const auto f = [&](const char* n) { return fx + "/" + n; };
  const auto o = [&](const char* n) { return (dir / n).string(); };
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(o("demo.cfg")) << "train_instances = 16\ntest_instances = 8\n"
                                    "train_epochs = 2\nhidden_widths = 16, 16\n";
  }
  const std::vector<std::vector<std::string>> commands{
      {"stats", "--gt", f("gt.json"), "--out", o("stats.json"), "--csv", o("stats.csv")},
      {"correct", "--gt", f("gt_noisy.json"), "--out", o("fixed.json")},
      {"refine", "--pred", f("coarse.json"), "--features", f("features.json"), "--model",
       f("model.json"), "--out", o("refined.json")},
      {"tta-fuse", "--config", f("tta.cfg"), "--gt", f("gt.json"), "--pred",
       f("tta_identity.json"), "--pred", f("tta_flip.json"), "--pred", f("tta_scale.json"),
       "--out", o("tta.json")},
      {"ensemble", "--pred", f("pred_a.json"), "--pred", f("pred_b.json"), "--out",
       o("ensemble.json")},
      {"eval", "--gt", f("gt.json"), "--pred", o("ensemble.json"), "--out", o("eval.json")},
      {"train-demo", "--config", o("demo.cfg"), "--out", o("demo")},
  };
  std::map<std::string, std::string> files;
  for (auto args : commands) {
    args.push_back("--threads");
    args.push_back(std::to_string(threads));
    std::ostringstream out, err;
    if (cli::dispatch(args, out, err) != cli::kExitOk) {
      std::fprintf(stderr, "%s failed: %s", args.front().c_str(), err.str().c_str());
      ++failures;
    }
    files["stdout " + args.front()] = out.str();
  }
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "segkit_acceptance";
  int failures = 0;
  const auto a = run_cli(root / "run1", 1, failures);
  const auto b = run_cli(root / "run2", 1, failures);
  const auto c = run_cli(root / "threads4", 4, failures);
  fs::remove_all(root);
  int differ_runs = 0, differ_threads = 0;
  for (const auto& [name, bytes] : a) {
    if (!b.contains(name) || b.at(name) != bytes) ++differ_runs;
    if (!c.contains(name) || c.at(name) != bytes) ++differ_threads;
  }
  const bool pass = failures == 0 && differ_runs == 0 && differ_threads == 0 &&
                    a.size() == b.size() && a.size() == c.size();
  return {pass, "7 subcommands, " + std::to_string(a.size()) + " outputs; " +
                    std::to_string(differ_runs) + " differ across runs, " +
                    std::to_string(differ_threads) + " differ between 1 and 4 threads, " +
                    std::to_string(failures) + " command failures"};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"codec-exactness", 5.0, codec_exactness},
      {"focal-loss-suite", 10.0, focal_loss_suite},
      {"evaluator-oracle", 60.0, evaluator_oracle},
      {"point-refinement", 180.0, refinement_benchmark},
      {"mask-correction", 60.0, mask_correction},
      {"fusion-suite", 60.0, fusion_suite},
      {"cli-determinism", 120.0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %-18s %s; %.2fs (budget %.0fs)%s\n", pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
