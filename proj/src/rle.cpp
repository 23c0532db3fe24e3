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

#include "segkit/rle.hpp"

#include <algorithm>
#include <numeric>

#include "segkit/error.hpp"

namespace segkit {

Rle::Rle(int width, int height, std::vector<std::uint32_t> counts)
    : width_(width), height_(height), counts_(std::move(counts)) {
  if (width < 1 || height < 1) throw CodecError("RLE dimensions must be positive");
  if (counts_.empty()) throw CodecError("RLE has no counts");
  for (std::size_t i = 1; i < counts_.size(); ++i) {
    if (counts_[i] == 0) {
      throw CodecError("RLE has a zero run at index " + std::to_string(i));
    }
  }
  const std::uint64_t total =
      std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  const std::uint64_t expected = static_cast<std::uint64_t>(width) * height;
  if (total != expected) {
    throw CodecError("RLE counts sum to " + std::to_string(total) +
                     ", expected " + std::to_string(expected));
  }
}

std::uint64_t Rle::area() const {
  std::uint64_t a = 0;
  for (std::size_t i = 1; i < counts_.size(); i += 2) a += counts_[i];
  return a;
}

Rle rle_encode(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint32_t> counts;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      const std::uint8_t v = mask.at(r, c) ? 1 : 0;
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return Rle(w, h, std::move(counts));
}

BinaryMask rle_decode(const Rle& rle) {
  const int w = rle.width();
  const int h = rle.height();
  BinaryMask mask(w, h);
  std::size_t k = 0;  // column-major position
  bool value = false;
  for (std::uint32_t n : rle.counts()) {
    for (std::uint32_t j = 0; j < n; ++j, ++k) {
      if (value) {
        mask.set(static_cast<int>(k % h), static_cast<int>(k / h), true);
      }
    }
    value = !value;
  }
  return mask;
}

std::string rle_to_string(const Rle& rle) {
  const auto& counts = rle.counts();
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = counts[i];
    if (i > 2) x -= static_cast<std::int64_t>(counts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      s.push_back(static_cast<char>(c + 48));
    }
  }
  return s;
}

Rle rle_from_string(std::string_view s, int width, int height) {
  std::vector<std::uint32_t> counts;
  std::size_t k = 0;
  while (k < s.size()) {
    std::int64_t x = 0;
    int shift = 0;
    bool more = true;
    while (more) {
      if (k >= s.size()) throw CodecError("truncated RLE string");
      const int c = static_cast<unsigned char>(s[k]) - 48;
      if (c < 0 || c > 63) {
        throw CodecError("invalid RLE character at offset " + std::to_string(k));
      }
      if (shift > 55) throw CodecError("RLE count overflows at offset " + std::to_string(k));
      x |= static_cast<std::int64_t>(c & 0x1f) << shift;
      more = (c & 0x20) != 0;
      ++k;
      shift += 5;
      if (!more && (c & 0x10)) x |= ~std::int64_t{0} << shift;
    }
    const std::size_t i = counts.size();
    if (i > 2) x += counts[i - 2];
    if (x < 0 || x > static_cast<std::int64_t>(UINT32_MAX)) {
      throw CodecError("RLE count out of range at index " + std::to_string(i));
    }
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return Rle(width, height, std::move(counts));
}

double rle_iou(const Rle& a, const Rle& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("RLE shape mismatch");
  }
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  std::size_t ia = 0, ib = 0;
  std::uint64_t ra = ca[0], rb = cb[0];
  bool va = false, vb = false;
  std::uint64_t inter = 0, uni = 0;
  while (ia < ca.size() && ib < cb.size()) {
    const std::uint64_t step = std::min(ra, rb);
    if (va || vb) uni += step;
    if (va && vb) inter += step;
    ra -= step;
    rb -= step;
    // Zero-length leading runs fall through here and flip immediately.
    while (ra == 0 && ia < ca.size()) {
      if (++ia < ca.size()) ra = ca[ia];
      va = !va;
    }
    while (rb == 0 && ib < cb.size()) {
      if (++ib < cb.size()) rb = cb[ib];
      vb = !vb;
    }
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

nlohmann::json rle_to_json(const Rle& rle, bool compressed) {
  nlohmann::json j;
  j["size"] = {rle.height(), rle.width()};
  if (compressed) {
    j["counts"] = rle_to_string(rle);
  } else {
    j["counts"] = rle.counts();
  }
  return j;
}

Rle rle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("counts")) {
    throw InputError("RLE object needs \"size\" and \"counts\"");
  }
  const auto& size = j.at("size");
  if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
      !size[1].is_number_integer()) {
    throw InputError("RLE \"size\" must be [height, width]");
  }
  const int height = size[0].get<int>();
  const int width = size[1].get<int>();
  const auto& counts = j.at("counts");
  if (counts.is_string()) {
    return rle_from_string(counts.get<std::string>(), width, height);
  }
  if (!counts.is_array()) throw InputError("RLE \"counts\" must be a string or list");
  std::vector<std::uint32_t> values;
  values.reserve(counts.size());
  for (const auto& c : counts) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
      throw InputError("RLE counts must be non-negative integers");
    }
    values.push_back(c.get<std::uint32_t>());
  }
  return Rle(width, height, std::move(values));
}

}  // namespace segkit
