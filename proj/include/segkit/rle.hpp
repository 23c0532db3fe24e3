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

#ifndef SEGKIT_RLE_HPP_
#define SEGKIT_RLE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "segkit/mask.hpp"

namespace segkit {

// Run-length encoding of a BinaryMask in column-major pixel order. Runs
// alternate starting with background, so counts[0] may be 0; no other count
// may be. The constructor enforces both invariants and sum(counts) == w * h,
// throwing CodecError otherwise.
class Rle {
 public:
  Rle(int width, int height, std::vector<std::uint32_t> counts);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  // Foreground pixel count.
  std::uint64_t area() const;

  friend bool operator==(const Rle&, const Rle&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint32_t> counts_;
};

Rle rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const Rle& rle);

// COCO compressed-RLE text form: 6-bit little-endian chunks offset by '0',
// with counts past index 2 stored as deltas to counts[i - 2].
std::string rle_to_string(const Rle& rle);
Rle rle_from_string(std::string_view s, int width, int height);

// Mask IoU computed directly on the runs; 0 when both masks are empty.
double rle_iou(const Rle& a, const Rle& b);

// {"size": [height, width], "counts": "<string>" | [ints]}
nlohmann::json rle_to_json(const Rle& rle, bool compressed = true);
Rle rle_from_json(const nlohmann::json& j);

}  // namespace segkit

#endif  // SEGKIT_RLE_HPP_
