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

#include "segkit/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segkit/error.hpp"

namespace segkit {
namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw DimensionError("mask dimensions must be positive, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

void require_same_shape(int w0, int h0, int w1, int h1) {
  if (w0 != w1 || h0 != h1) {
    throw DimensionError("mask shape mismatch: " + std::to_string(w0) + "x" +
                         std::to_string(h0) + " vs " + std::to_string(w1) +
                         "x" + std::to_string(h1));
  }
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height), bits_(checked_area(width, height), 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != checked_area(width, height)) {
    throw DimensionError("binary mask holds " + std::to_string(bits_.size()) +
                         " values for a " + std::to_string(width) + "x" +
                         std::to_string(height) + " grid");
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](auto b) { return b > 1; })) {
    throw InputError("binary mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

ProbabilityMask::ProbabilityMask(int width, int height, double fill)
    : width_(width), height_(height), probs_(checked_area(width, height), fill) {
  if (!is_probability(fill)) throw InputError("probability outside [0, 1]");
}

ProbabilityMask::ProbabilityMask(int width, int height, std::vector<double> probs)
    : width_(width), height_(height), probs_(std::move(probs)) {
  if (probs_.size() != checked_area(width, height)) {
    throw DimensionError("probability mask holds " +
                         std::to_string(probs_.size()) + " values for a " +
                         std::to_string(width) + "x" + std::to_string(height) +
                         " grid");
  }
  if (!std::all_of(probs_.begin(), probs_.end(), is_probability)) {
    throw InputError("probability outside [0, 1]");
  }
}

void ProbabilityMask::set_index(std::size_t i, double p) {
  if (!is_probability(p)) throw InputError("probability outside [0, 1]");
  probs_[i] = p;
}

BinaryMask threshold(const ProbabilityMask& mask, double threshold) {
  std::vector<std::uint8_t> bits(mask.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = mask[i] >= threshold;
  return BinaryMask(mask.width(), mask.height(), std::move(bits));
}

ProbabilityMask to_probability(const BinaryMask& mask) {
  std::vector<double> probs(mask.bits().begin(), mask.bits().end());
  return ProbabilityMask(mask.width(), mask.height(), std::move(probs));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a.width(), a.height(), b.width(), b.height());
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto abits = a.bits();
  auto bbits = b.bits();
  for (std::size_t i = 0; i < abits.size(); ++i) {
    inter += abits[i] & bbits[i];
    uni += abits[i] | bbits[i];
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BBox bbox_of(const BinaryMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      x0 = std::min(x0, c);
      x1 = std::max(x1, c);
      y0 = std::min(y0, r);
      y1 = std::max(y1, r);
    }
  }
  if (x1 < 0) return BBox{};
  return BBox{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

double box_iou(const BBox& a, const BBox& b) {
  const std::int64_t iw =
      std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const std::int64_t ih =
      std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const std::int64_t inter = iw * ih;
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double aligned_coordinate(int i, int src_len, int dst_len) {
  if (src_len <= 1 || dst_len <= 1) return 0.0;
  return static_cast<double>(i) * (src_len - 1) / (dst_len - 1);
}

ProbabilityMask resize_prob(const ProbabilityMask& mask, int new_width,
                            int new_height) {
  checked_area(new_width, new_height);
  const int sw = mask.width();
  const int sh = mask.height();

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int src_len, int dst_len) {
    std::vector<Tap> out(dst_len);
    for (int i = 0; i < dst_len; ++i) {
      const double s = aligned_coordinate(i, src_len, dst_len);
      const int lo = std::min(static_cast<int>(std::floor(s)), src_len - 1);
      const int hi = std::min(lo + 1, src_len - 1);
      out[i] = Tap{lo, hi, s - lo};
    }
    return out;
  };
  const auto xs = taps(sw, new_width);
  const auto ys = taps(sh, new_height);

  std::vector<double> out(static_cast<std::size_t>(new_width) * new_height);
  for (int r = 0; r < new_height; ++r) {
    const Tap& ty = ys[r];
    for (int c = 0; c < new_width; ++c) {
      const Tap& tx = xs[c];
      const double top = std::lerp(mask.at(ty.lo, tx.lo), mask.at(ty.lo, tx.hi), tx.frac);
      const double bottom = std::lerp(mask.at(ty.hi, tx.lo), mask.at(ty.hi, tx.hi), tx.frac);
      out[static_cast<std::size_t>(r) * new_width + c] =
          std::clamp(std::lerp(top, bottom, ty.frac), 0.0, 1.0);
    }
  }
  return ProbabilityMask(new_width, new_height, std::move(out));
}

}  // namespace segkit
