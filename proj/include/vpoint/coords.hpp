// Pixel <-> percent coordinate conventions.
//
// Copyright 2026 the vpoint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>

#include "vpoint/mask.hpp"

namespace vpoint {

// Pixel centers: column c maps to 100 * (c + 0.5) / extent.
inline double pixel_to_percent(int index, int extent) {
    return 100.0 * (index + 0.5) / extent;
}

inline int percent_to_pixel(double percent, int extent) {
    const int i = static_cast<int>(std::floor(percent / 100.0 * extent));
    return std::clamp(i, 0, extent - 1);
}

inline PixelPoint percent_to_pixel_point(double x_pct, double y_pct, int width, int height) {
    return {percent_to_pixel(x_pct, width), percent_to_pixel(y_pct, height)};
}

}  // namespace vpoint
