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

#ifndef SEGKIT_MASK_HPP_
#define SEGKIT_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segkit {

// Axis-aligned pixel box; (x, y) is the inclusive top-left corner.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

// Foreground bitmap on a width x height grid, stored row-major as 0/1 bytes.
class BinaryMask {
 public:
  BinaryMask(int width, int height);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool value) { bits_[index(row, col)] = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set_index(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

  // Number of foreground pixels.
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Per-pixel foreground probability, row-major, every value in [0, 1].
class ProbabilityMask {
 public:
  ProbabilityMask(int width, int height, double fill = 0.0);
  ProbabilityMask(int width, int height, std::vector<double> probs);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return probs_.size(); }

  double at(int row, int col) const { return probs_[index(row, col)]; }
  void set(int row, int col, double p) { set_index(index(row, col), p); }
  double operator[](std::size_t i) const { return probs_[i]; }
  void set_index(std::size_t i, double p);
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const ProbabilityMask&, const ProbabilityMask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_;
  int height_;
  std::vector<double> probs_;
};

// Foreground where p >= threshold.
BinaryMask threshold(const ProbabilityMask& mask, double threshold = 0.5);
ProbabilityMask to_probability(const BinaryMask& mask);

// |a ∩ b| / |a ∪ b|; 0 when both are empty. Throws DimensionError on shape
// mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Tightest box around the foreground; an empty mask gives BBox{0, 0, 0, 0}.
BBox bbox_of(const BinaryMask& mask);

double box_iou(const BBox& a, const BBox& b);

// Bilinear resampling with corner-aligned coordinates: target index i reads
// source coordinate i * (src_len - 1) / (dst_len - 1). A length-1 axis on
// either side samples coordinate 0.
ProbabilityMask resize_prob(const ProbabilityMask& mask, int new_width,
                            int new_height);

// Corner-aligned source coordinate for target index `i`.
double aligned_coordinate(int i, int src_len, int dst_len);

}  // namespace segkit

#endif  // SEGKIT_MASK_HPP_
