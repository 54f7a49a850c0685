// Bidirectional temporal mask fusion over sparse keyframes, plus the
// naive single-direction baseline strategies.
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

#include <string>
#include <vector>

#include "vpoint/clip.hpp"
#include "vpoint/mask.hpp"

namespace vpoint {

/// Maps a mask at one frame to an estimated mask at another frame.
/// Direction is implied by the sign of (target - source). Must be
/// deterministic and safe for concurrent read-only use.
class Propagator {
public:
    virtual ~Propagator() = default;
    virtual BinaryMask propagate(int source_frame, const BinaryMask& source_mask,
                                 int target_frame) const = 0;
};

enum class FusionStrategy {
    kBidirectional,
    kPreferLeft,
    kPreferRight,
    kIntersection,
    kLarger,
    kSmaller,
};

FusionStrategy parse_strategy(const std::string& name);
std::string strategy_name(FusionStrategy s);
std::vector<FusionStrategy> all_strategies();

inline constexpr double kDefaultTau = 0.7;
inline constexpr int kDefaultSamplingRate = 5;

struct FusionConfig {
    int k = kDefaultSamplingRate;  // frame sampling rate
    double tau = kDefaultTau;      // IoU agreement threshold
    FusionStrategy strategy = FusionStrategy::kBidirectional;
};

/// Sparse keyframe masks: strictly increasing indices starting at 0,
/// gaps at most the sampling rate, one mask per object at each index.
struct KeyframeSet {
    std::vector<int> indices;
    std::vector<std::vector<BinaryMask>> masks;  // [keyframe][object]
};

/// {0, k, 2k, ...} below frame_count.
std::vector<int> keyframes(int frame_count, int k);

/// Builds a keyframe set by sampling a ground-truth clip at rate k.
KeyframeSet keyframes_from_clip(const MaskClip& clip, int k);

/// Reconciles left/right propagated masks: one empty side yields the
/// other; IoU >= tau yields the intersection, otherwise the union.
BinaryMask fuse_pair(const BinaryMask& left, const BinaryMask& right, double tau);

/// Naive baselines (prefer-left/right, intersection, larger, smaller;
/// cardinality ties go left).
BinaryMask fuse_naive(const BinaryMask& left, const BinaryMask& right, FusionStrategy strategy);

/// Dense per-frame masks: keyframe frames keep their masks, intermediate
/// frames fuse bidirectional propagations under the strategy, frames past
/// the last keyframe use forward propagation only. Propagator failures
/// count as empty masks.
MaskClip fuse_clip(const KeyframeSet& kf, const Propagator& prop, const FusionConfig& cfg,
                   int frame_count, int width, int height, const std::vector<int>& object_ids);

}  // namespace vpoint
