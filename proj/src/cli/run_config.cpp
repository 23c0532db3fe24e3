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

#include "segkit/cli/run_config.hpp"

#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>

#include "segkit/error.hpp"

namespace segkit::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return items;
}

double to_double(std::string_view s) {
  const std::string text(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("'" + text + "' is not a number");
  }
  return v;
}

long long to_integer(std::string_view s) {
  const std::string text(s);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("'" + text + "' is not an integer");
  }
  return v;
}

std::size_t to_count(std::string_view s) {
  const long long v = to_integer(s);
  if (v < 0) throw std::invalid_argument("'" + std::string(s) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"focal_alpha",
       [](RunConfig& c, std::string_view v) {
         c.focal.alpha.clear();
         for (auto item : split_list(v)) c.focal.alpha.push_back(to_double(item));
       }},
      {"focal_gamma", [](RunConfig& c, std::string_view v) { c.focal.gamma = to_double(v); }},
      {"w_cls", [](RunConfig& c, std::string_view v) { c.weights.cls = to_double(v); }},
      {"w_box", [](RunConfig& c, std::string_view v) { c.weights.box = to_double(v); }},
      {"w_mask", [](RunConfig& c, std::string_view v) { c.weights.mask = to_double(v); }},
      {"w_point", [](RunConfig& c, std::string_view v) { c.weights.point = to_double(v); }},
      {"coarse_size",
       [](RunConfig& c, std::string_view v) {
         c.subdivision.coarse_size = static_cast<int>(to_integer(v));
       }},
      {"subdivision_steps",
       [](RunConfig& c, std::string_view v) {
         c.subdivision.steps = static_cast<int>(to_integer(v));
       }},
      {"points_per_step",
       [](RunConfig& c, std::string_view v) {
         c.subdivision.points_per_step = static_cast<int>(to_integer(v));
       }},
      {"mask_threshold",
       [](RunConfig& c, std::string_view v) { c.subdivision.threshold = to_double(v); }},
      {"tta_transforms",
       [](RunConfig& c, std::string_view v) {
         c.tta.clear();
         for (auto item : split_list(v)) c.tta.push_back(TtaTransform::parse(item));
       }},
      {"ensemble_iou", [](RunConfig& c, std::string_view v) { c.ensemble_iou = to_double(v); }},
      {"ensemble_models",
       [](RunConfig& c, std::string_view v) { c.ensemble_models = to_count(v); }},
      {"eval_max_dets", [](RunConfig& c, std::string_view v) { c.eval_max_dets = to_count(v); }},
      {"speckle_fraction",
       [](RunConfig& c, std::string_view v) { c.correction.speckle_fraction = to_double(v); }},
      {"hole_fraction",
       [](RunConfig& c, std::string_view v) { c.correction.hole_fraction = to_double(v); }},
      {"anchor_coverage",
       [](RunConfig& c, std::string_view v) { c.anchor_coverage = to_double(v); }},
      {"train_epochs",
       [](RunConfig& c, std::string_view v) {
         c.training.epochs = static_cast<int>(to_integer(v));
       }},
      {"train_lr",
       [](RunConfig& c, std::string_view v) { c.training.learning_rate = to_double(v); }},
      {"train_momentum",
       [](RunConfig& c, std::string_view v) { c.training.momentum = to_double(v); }},
      {"train_batch_size",
       [](RunConfig& c, std::string_view v) {
         c.training.batch_size = static_cast<int>(to_integer(v));
       }},
      {"train_points",
       [](RunConfig& c, std::string_view v) {
         c.training.points_per_example = static_cast<int>(to_integer(v));
       }},
      {"hidden_widths",
       [](RunConfig& c, std::string_view v) {
         c.training.hidden_widths.clear();
         for (auto item : split_list(v)) {
           c.training.hidden_widths.push_back(static_cast<int>(to_integer(item)));
         }
       }},
      {"train_instances",
       [](RunConfig& c, std::string_view v) { c.train_instances = to_count(v); }},
      {"test_instances",
       [](RunConfig& c, std::string_view v) { c.test_instances = to_count(v); }},
      {"seed",
       [](RunConfig& c, std::string_view v) {
         c.seed = static_cast<std::uint64_t>(to_count(v));
       }},
      {"threads",
       [](RunConfig& c, std::string_view v) { c.threads = static_cast<int>(to_integer(v)); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  focal.validate();
  subdivision.validate();
  training.validate();
  for (double w : {weights.cls, weights.box, weights.mask, weights.point}) {
    if (!(w >= 0.0)) throw std::invalid_argument("loss weights must be non-negative");
  }
  if (!(ensemble_iou >= 0.0 && ensemble_iou <= 1.0)) {
    throw std::invalid_argument("ensemble_iou must lie in [0, 1]");
  }
  if (eval_max_dets < 1) throw std::invalid_argument("eval_max_dets must be >= 1");
  for (double f : {correction.speckle_fraction, correction.hole_fraction}) {
    if (!(f >= 0.0 && f < 1.0)) throw std::invalid_argument("correction fractions must lie in [0, 1)");
  }
  if (!(anchor_coverage > 0.0 && anchor_coverage <= 1.0)) {
    throw std::invalid_argument("anchor_coverage must lie in (0, 1]");
  }
  if (train_instances < 1 || test_instances < 1) {
    throw std::invalid_argument("train_instances and test_instances must be >= 1");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
  }
  it->second(config, value);
}

RunConfig parse_run_config(std::string_view text, const std::string& origin) {
  RunConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError(where + "expected 'key = value'");
    try {
      apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw InputError(where + e.what());
    }
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(origin + ": " + e.what());
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, path);
}

}  // namespace segkit::cli
