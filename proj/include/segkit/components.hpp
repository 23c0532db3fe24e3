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

#ifndef SEGKIT_COMPONENTS_HPP_
#define SEGKIT_COMPONENTS_HPP_

#include <cstddef>
#include <vector>

#include "segkit/mask.hpp"

namespace segkit {

struct Component {
  int id = 0;
  std::size_t pixel_count = 0;
  // Row-major pixel indices, ascending.
  std::vector<std::size_t> pixels;
};

// 8-connected foreground components. Ids follow the output order: decreasing
// pixel_count, ties broken by the smallest row-major first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

// Background regions that are 4-connected and do not touch the grid border,
// in the same order as connected_components.
std::vector<Component> enclosed_holes(const BinaryMask& mask);

struct CorrectionParams {
  double speckle_fraction = 0.05;
  double hole_fraction = 0.05;
};

// Drops foreground components smaller than speckle_fraction of the largest
// one, then fills enclosed holes smaller than hole_fraction of it. The two
// passes repeat until the mask stops changing, so the result is a fixed point.
BinaryMask correct_mask(const BinaryMask& mask, const CorrectionParams& params = {});

}  // namespace segkit

#endif  // SEGKIT_COMPONENTS_HPP_
