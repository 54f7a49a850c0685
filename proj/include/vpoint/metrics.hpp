// Evaluation suite: region Jaccard J, boundary F-measure F, J&F,
// point precision/recall/F1, counting MAE/EMA.
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

#include <vector>

#include "vpoint/clip.hpp"
#include "vpoint/mask.hpp"

namespace vpoint {

struct SegScore {
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;  // (j + f) / 2
};

struct PointScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matched = 0;
    std::size_t predicted = 0;
    std::size_t actual = 0;  // nonempty gt objects over all scored frames
};

struct CountScore {
    double mae = 0.0;  // mean |pred - gt|
    double ema = 0.0;  // 100 * exact-match fraction
};

/// A predicted point for one frame, percent coordinates in [0, 100].
struct FramePoint {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
};

/// DAVIS-style boundary tolerance: max(1, round(0.008 * image diagonal)).
double boundary_tolerance(int width, int height);

/// Per-(object, frame) IoU averaged over frames, then over objects.
/// Empty-vs-empty frames score 1 (object absent in both).
double region_jaccard(const MaskClip& pred, const MaskClip& gt);

/// Boundary precision/recall under a Euclidean pixel tolerance;
/// F = 2PR/(P+R), 0 when P+R = 0, 1 when both boundaries are empty.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double tol);

/// J and F averaged per object over frames, then over objects; boundary
/// tolerance derived from the image diagonal.
SegScore jf(const MaskClip& pred, const MaskClip& gt);

/// A predicted point matches a gt object iff it lies inside that object's
/// mask; greedy one-to-one assignment in prediction order; counts are
/// aggregated over frames before the ratios are formed.
PointScore point_prf(const std::vector<FramePoint>& pred_points, const MaskClip& gt);

CountScore counting(const std::vector<int>& preds, const std::vector<int>& gts);

}  // namespace vpoint
