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

#include "segkit/components.hpp"

#include <algorithm>
#include <stdexcept>

#include "segkit/error.hpp"

namespace segkit {
namespace {

// Labels pixels equal to `value`; `diagonal` selects 8- over 4-connectivity.
// When `skip_border` is set, components touching the border are dropped.
std::vector<Component> label(const BinaryMask& mask, bool value, bool diagonal,
                             bool skip_border) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Component> out;
  std::vector<std::size_t> stack;

  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (seen[seed] || mask[seed] != value) continue;
    Component comp;
    bool touches_border = false;
    seen[seed] = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      comp.pixels.push_back(p);
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      if (r == 0 || c == 0 || r == h - 1 || c == w - 1) touches_border = true;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (!diagonal && dr != 0 && dc != 0) continue;
          const int nr = r + dr;
          const int nc = c + dc;
          if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
          const std::size_t q = static_cast<std::size_t>(nr) * w + nc;
          if (seen[q] || mask[q] != value) continue;
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    if (skip_border && touches_border) continue;
    std::sort(comp.pixels.begin(), comp.pixels.end());
    comp.pixel_count = comp.pixels.size();
    out.push_back(std::move(comp));
  }

  std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    return a.pixel_count > b.pixel_count;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

void check_fraction(double f, const char* name) {
  if (!(f >= 0.0 && f < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
  }
}

}  // namespace

std::vector<Component> connected_components(const BinaryMask& mask) {
  return label(mask, true, /*diagonal=*/true, /*skip_border=*/false);
}

std::vector<Component> enclosed_holes(const BinaryMask& mask) {
  return label(mask, false, /*diagonal=*/false, /*skip_border=*/true);
}

BinaryMask correct_mask(const BinaryMask& mask, const CorrectionParams& params) {
  check_fraction(params.speckle_fraction, "speckle_fraction");
  check_fraction(params.hole_fraction, "hole_fraction");

  BinaryMask current = mask;
  // The largest component only grows between rounds and is bounded by the
  // grid, so this terminates; the cap guards against a logic error.
  for (std::size_t round = 0; round <= mask.size(); ++round) {
    const auto components = connected_components(current);
    if (components.empty()) return current;
    const double largest = static_cast<double>(components.front().pixel_count);

    BinaryMask next = current;
    for (const auto& comp : components) {
      if (static_cast<double>(comp.pixel_count) < params.speckle_fraction * largest) {
        for (std::size_t p : comp.pixels) next.set_index(p, false);
      }
    }
    for (const auto& hole : enclosed_holes(next)) {
      if (static_cast<double>(hole.pixel_count) < params.hole_fraction * largest) {
        for (std::size_t p : hole.pixels) next.set_index(p, true);
      }
    }
    if (next == current) return current;
    current = std::move(next);
  }
  throw Error("correct_mask did not converge");
}

}  // namespace segkit
