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

#ifndef SEGKIT_CLI_RUN_CONFIG_HPP_
#define SEGKIT_CLI_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "segkit/coco_eval.hpp"
#include "segkit/components.hpp"
#include "segkit/disk_benchmark.hpp"
#include "segkit/focal_loss.hpp"
#include "segkit/fusion.hpp"
#include "segkit/point_head_trainer.hpp"
#include "segkit/subdivision.hpp"

namespace segkit::cli {

// Every tunable of the pipeline. Defaults are the library defaults.
//
// Text form, one `key = value` per line, `#` starts a comment:
//   focal_alpha = 1.0, 2.0        focal_gamma = 2
//   w_cls, w_box, w_mask, w_point
//   coarse_size, subdivision_steps, points_per_step, mask_threshold
//   tta_transforms = identity, flip, scale:1.25
//   ensemble_iou, ensemble_models (0 = number of --pred files)
//   eval_max_dets
//   speckle_fraction, hole_fraction, anchor_coverage
//   train_epochs, train_lr, train_momentum, train_batch_size, train_points,
//   hidden_widths = 64, 64, 64, train_instances, test_instances
//   seed, threads
struct RunConfig {
  FocalLossParams focal;
  CompositeLossWeights weights;
  SubdivisionConfig subdivision;
  std::vector<TtaTransform> tta;
  double ensemble_iou = 0.5;
  std::size_t ensemble_models = 0;
  std::size_t eval_max_dets = 100;
  CorrectionParams correction;
  double anchor_coverage = 0.9;
  TrainingOptions training;
  std::size_t train_instances = 120;
  std::size_t test_instances = 64;
  std::uint64_t seed = 42;
  int threads = 1;

  // Throws std::invalid_argument naming the offending setting.
  void validate() const;
};

// Applies one setting; throws std::invalid_argument for unknown keys or bad
// values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Parses the text form over the defaults. Errors are InputError prefixed
// with "origin:line:".
RunConfig parse_run_config(std::string_view text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);

}  // namespace segkit::cli

#endif  // SEGKIT_CLI_RUN_CONFIG_HPP_
