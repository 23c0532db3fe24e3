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

#include "segkit/dataset_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "segkit/error.hpp"

namespace segkit {
namespace {

void require_increasing(std::span<const double> edges, const char* what) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw std::invalid_argument(std::string(what) + " must be strictly increasing");
    }
  }
}

std::size_t bin_of(double value, std::span<const double> edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

}  // namespace

std::vector<CategoryCount> category_histogram(const AnnotationSet& set) {
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& inst : set.instances) ++counts[inst.category_id];
  std::vector<CategoryCount> out;
  for (const auto& cat : set.categories) {
    const auto it = counts.find(cat.id);
    out.push_back(CategoryCount{cat.id, cat.name, it == counts.end() ? 0 : it->second});
  }
  std::sort(out.begin(), out.end(), [](const CategoryCount& a, const CategoryCount& b) {
    return a.category_id < b.category_id;
  });
  return out;
}

std::vector<double> default_area_edges() { return {96.0 * 96.0, 256.0 * 256.0}; }

std::vector<double> area_buckets(const AnnotationSet& set, std::span<const double> edges) {
  if (set.instances.empty()) throw std::invalid_argument("area_buckets: no instances");
  require_increasing(edges, "area edges");
  std::vector<std::size_t> counts(edges.size() + 1, 0);
  for (const auto& inst : set.instances) {
    // Buckets are closed on the right: (e_{i-1}, e_i].
    const double area = static_cast<double>(inst.area);
    const auto it = std::lower_bound(edges.begin(), edges.end(), area);
    ++counts[static_cast<std::size_t>(it - edges.begin())];
  }
  std::vector<double> fractions;
  for (std::size_t c : counts) {
    fractions.push_back(static_cast<double>(c) / static_cast<double>(set.instances.size()));
  }
  return fractions;
}

std::vector<AspectRatio> candidate_ratios() {
  return {AspectRatio{1, 3}, AspectRatio{1, 2}, AspectRatio{1, 1}, AspectRatio{2, 1},
          AspectRatio{3, 1}};
}

std::vector<double> default_log_ratio_edges() {
  const auto ratios = candidate_ratios();
  std::vector<double> edges;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    edges.push_back(0.5 * (std::log(ratios[i - 1].value()) + std::log(ratios[i].value())));
  }
  return edges;
}

AspectHistogram aspect_ratio_histogram(const AnnotationSet& set,
                                       std::span<const double> log_edges) {
  require_increasing(log_edges, "log-ratio edges");
  AspectHistogram hist;
  hist.edges.assign(log_edges.begin(), log_edges.end());
  hist.counts.assign(log_edges.size() + 1, 0);
  for (const auto& inst : set.instances) {
    const BBox box = bbox_of(rle_decode(inst.mask));
    if (box.w == 0 || box.h == 0) {
      ++hist.degenerate;
      continue;
    }
    ++hist.counts[bin_of(std::log(static_cast<double>(box.h) / box.w), log_edges)];
  }
  return hist;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return std::lerp(sorted[lo], sorted[hi], pos - static_cast<double>(lo));
}

AnchorConfig recommend_anchors(const AnnotationSet& set, double coverage) {
  if (set.instances.empty()) throw std::invalid_argument("recommend_anchors: no instances");
  std::vector<double> sides;
  for (const auto& inst : set.instances) {
    if (inst.area > 0) sides.push_back(std::sqrt(static_cast<double>(inst.area)) * kAnchorResizeFactor);
  }
  if (sides.empty()) throw std::invalid_argument("recommend_anchors: every mask is empty");
  std::sort(sides.begin(), sides.end());
  const long lo = std::lround(std::log2(quantile(sides, 0.05)));
  const long hi = std::lround(std::log2(quantile(sides, 0.95)));

  AnchorConfig config;
  for (long e = std::max(lo, 0L); e <= std::max(hi, 0L); ++e) {
    config.sizes.push_back(1 << e);
  }

  const auto ratios = candidate_ratios();
  const AspectHistogram hist = aspect_ratio_histogram(set, default_log_ratio_edges());
  std::size_t total = 0;
  for (std::size_t c : hist.counts) total += c;
  // Symmetric sets grow outward from the 1:1 bin.
  const std::size_t center = ratios.size() / 2;
  std::size_t half = 0;
  for (; half < center; ++half) {
    std::size_t covered = 0;
    for (std::size_t b = center - half; b <= center + half; ++b) covered += hist.counts[b];
    if (total > 0 && static_cast<double>(covered) >= coverage * static_cast<double>(total)) break;
  }
  config.ratios.assign(ratios.begin() + static_cast<std::ptrdiff_t>(center - half),
                       ratios.begin() + static_cast<std::ptrdiff_t>(center + half + 1));
  return config;
}

DatasetStats compute_stats(const AnnotationSet& set, double coverage) {
  DatasetStats stats;
  stats.images = set.images.size();
  stats.instances = set.instances.size();
  stats.categories = category_histogram(set);
  stats.area_edges = default_area_edges();
  stats.aspect = aspect_ratio_histogram(set);
  if (!set.instances.empty()) {
    stats.area_fractions = area_buckets(set, stats.area_edges);
    stats.anchors = recommend_anchors(set, coverage);
  }
  return stats;
}

nlohmann::json stats_to_json(const DatasetStats& s) {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : s.categories) {
    cats.push_back({{"category_id", c.category_id}, {"name", c.name}, {"count", c.count}});
  }
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& r : s.anchors.ratios) ratios.push_back(r.label());
  return nlohmann::json{
      {"images", s.images},
      {"instances", s.instances},
      {"categories", cats},
      {"area_edges", s.area_edges},
      {"area_fractions", s.area_fractions},
      {"aspect_log_edges", s.aspect.edges},
      {"aspect_counts", s.aspect.counts},
      {"aspect_degenerate", s.aspect.degenerate},
      {"anchor_sizes", s.anchors.sizes},
      {"anchor_ratios", ratios},
  };
}

std::string format_stats_report(const DatasetStats& s) {
  std::ostringstream os;
  char buf[256];
  os << "images: " << s.images << "\ninstances: " << s.instances << "\n\n";
  std::size_t name_width = 4;
  for (const auto& c : s.categories) name_width = std::max(name_width, c.name.size());
  std::snprintf(buf, sizeof(buf), "%10s  %-*s  %8s\n", "category", static_cast<int>(name_width),
                "name", "count");
  os << buf;
  for (const auto& c : s.categories) {
    std::snprintf(buf, sizeof(buf), "%10lld  %-*s  %8zu\n", static_cast<long long>(c.category_id),
                  static_cast<int>(name_width), c.name.c_str(), c.count);
    os << buf;
  }
  if (!s.area_fractions.empty()) {
    os << "\narea buckets (mask pixels)\n";
    for (std::size_t i = 0; i < s.area_fractions.size(); ++i) {
      std::string label;
      if (i == 0) {
        label = "<= " + std::to_string(static_cast<long long>(s.area_edges[0]));
      } else if (i == s.area_edges.size()) {
        label = "> " + std::to_string(static_cast<long long>(s.area_edges.back()));
      } else {
        label = "(" + std::to_string(static_cast<long long>(s.area_edges[i - 1])) + ", " +
                std::to_string(static_cast<long long>(s.area_edges[i])) + "]";
      }
      std::snprintf(buf, sizeof(buf), "  %-20s %7.4f\n", label.c_str(), s.area_fractions[i]);
      os << buf;
    }
  }
  os << "\naspect ratio h/w (bins in ln space)\n";
  for (std::size_t i = 0; i < s.aspect.counts.size(); ++i) {
    const double lo = i == 0 ? -INFINITY : std::exp(s.aspect.edges[i - 1]);
    const double hi = i == s.aspect.edges.size() ? INFINITY : std::exp(s.aspect.edges[i]);
    std::snprintf(buf, sizeof(buf), "  [%7.3f, %7.3f)  %8zu\n", lo, hi, s.aspect.counts[i]);
    os << buf;
  }
  os << "  degenerate          " << s.aspect.degenerate << "\n";
  if (!s.anchors.sizes.empty()) {
    os << "\nanchor sizes:";
    for (int size : s.anchors.sizes) os << ' ' << size;
    os << "\nanchor ratios (h:w):";
    for (const auto& r : s.anchors.ratios) os << ' ' << r.label();
    os << '\n';
  }
  return os.str();
}

std::string stats_to_csv(const DatasetStats& s) {
  std::ostringstream os;
  os << "category_id,name,count\n";
  for (const auto& c : s.categories) {
    os << c.category_id << ',' << c.name << ',' << c.count << '\n';
  }
  os << "\nbin,log_lower,log_upper,count\n";
  char buf[128];
  for (std::size_t i = 0; i < s.aspect.counts.size(); ++i) {
    const double lo = i == 0 ? -INFINITY : s.aspect.edges[i - 1];
    const double hi = i == s.aspect.edges.size() ? INFINITY : s.aspect.edges[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%zu\n", i, lo, hi, s.aspect.counts[i]);
    os << buf;
  }
  return os.str();
}

}  // namespace segkit
