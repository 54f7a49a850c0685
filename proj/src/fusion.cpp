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

#include "vpoint/fusion.hpp"

#include <stdexcept>

namespace vpoint {

FusionStrategy parse_strategy(const std::string& name) {
    if (name == "bidirectional") return FusionStrategy::kBidirectional;
    if (name == "prefer-left") return FusionStrategy::kPreferLeft;
    if (name == "prefer-right") return FusionStrategy::kPreferRight;
    if (name == "intersection") return FusionStrategy::kIntersection;
    if (name == "larger") return FusionStrategy::kLarger;
    if (name == "smaller") return FusionStrategy::kSmaller;
    throw std::invalid_argument("unknown fusion strategy: " + name);
}

std::string strategy_name(FusionStrategy s) {
    switch (s) {
        case FusionStrategy::kBidirectional: return "bidirectional";
        case FusionStrategy::kPreferLeft: return "prefer-left";
        case FusionStrategy::kPreferRight: return "prefer-right";
        case FusionStrategy::kIntersection: return "intersection";
        case FusionStrategy::kLarger: return "larger";
        case FusionStrategy::kSmaller: return "smaller";
    }
    throw std::invalid_argument("bad strategy value");
}

std::vector<FusionStrategy> all_strategies() {
    return {FusionStrategy::kBidirectional, FusionStrategy::kPreferLeft,
            FusionStrategy::kPreferRight,   FusionStrategy::kIntersection,
            FusionStrategy::kLarger,        FusionStrategy::kSmaller};
}

std::vector<int> keyframes(int frame_count, int k) {
    if (frame_count < 1) throw std::invalid_argument("keyframes: frame_count must be >= 1");
    if (k < 1) throw std::invalid_argument("keyframes: k must be >= 1");
    std::vector<int> out;
    for (int i = 0; i < frame_count; i += k) out.push_back(i);
    return out;
}

KeyframeSet keyframes_from_clip(const MaskClip& clip, int k) {
    KeyframeSet kf;
    kf.indices = keyframes(clip.frame_count(), k);
    for (int idx : kf.indices) {
        std::vector<BinaryMask> frame_masks;
        frame_masks.reserve(clip.object_count());
        for (int oi = 0; oi < clip.object_count(); ++oi) frame_masks.push_back(clip.mask(idx, oi));
        kf.masks.push_back(std::move(frame_masks));
    }
    return kf;
}

BinaryMask fuse_pair(const BinaryMask& left, const BinaryMask& right, double tau) {
    if (!left.same_shape(right)) throw std::invalid_argument("fuse_pair: dimension mismatch");
    const bool left_empty = left.empty();
    const bool right_empty = right.empty();
    if (left_empty && right_empty) return left;
    if (left_empty) return right;   // fallback: one-sided propagation failure
    if (right_empty) return left;
    if (mask_iou(left, right) >= tau) return mask_intersect(left, right);
    return mask_union(left, right);
}

BinaryMask fuse_naive(const BinaryMask& left, const BinaryMask& right, FusionStrategy strategy) {
    if (!left.same_shape(right)) throw std::invalid_argument("fuse_naive: dimension mismatch");
    switch (strategy) {
        case FusionStrategy::kPreferLeft: return left;
        case FusionStrategy::kPreferRight: return right;
        case FusionStrategy::kIntersection: return mask_intersect(left, right);
        case FusionStrategy::kLarger: return right.count() > left.count() ? right : left;
        case FusionStrategy::kSmaller: return right.count() < left.count() ? right : left;
        case FusionStrategy::kBidirectional:
            throw std::invalid_argument("fuse_naive: bidirectional is not a naive strategy");
    }
    throw std::invalid_argument("bad strategy value");
}

namespace {

BinaryMask propagate_or_empty(const Propagator& prop, int source, const BinaryMask& mask,
                              int target, int width, int height) {
    try {
        BinaryMask out = prop.propagate(source, mask, target);
        if (out.width() != width || out.height() != height)
            return BinaryMask(width, height);
        return out;
    } catch (const std::exception&) {
        return BinaryMask(width, height);  // failure feeds the empty-mask fallback
    }
}

}  // namespace

MaskClip fuse_clip(const KeyframeSet& kf, const Propagator& prop, const FusionConfig& cfg,
                   int frame_count, int width, int height, const std::vector<int>& object_ids) {
    if (kf.indices.empty() || kf.indices.front() != 0)
        throw std::invalid_argument("fuse_clip: keyframes must start at frame 0");
    if (kf.indices.size() != kf.masks.size())
        throw std::invalid_argument("fuse_clip: indices/masks size mismatch");
    for (std::size_t i = 0; i < kf.indices.size(); ++i) {
        if (i > 0 && kf.indices[i] <= kf.indices[i - 1])
            throw std::invalid_argument("fuse_clip: keyframe indices must increase");
        if (kf.indices[i] >= frame_count)
            throw std::invalid_argument("fuse_clip: keyframe index past clip end");
        if (kf.masks[i].size() != object_ids.size())
            throw std::invalid_argument("fuse_clip: keyframe object roster mismatch");
    }

    MaskClip out(width, height, frame_count, object_ids);
    const int object_count = static_cast<int>(object_ids.size());

    for (int oi = 0; oi < object_count; ++oi) {
        // keyframe frames keep their masks
        for (std::size_t ki = 0; ki < kf.indices.size(); ++ki)
            out.mask(kf.indices[ki], oi) = kf.masks[ki][oi];

        // intermediate frames between consecutive keyframes
        for (std::size_t ki = 0; ki + 1 < kf.indices.size(); ++ki) {
            const int a = kf.indices[ki];
            const int b = kf.indices[ki + 1];
            for (int f = a + 1; f < b; ++f) {
                const BinaryMask left =
                    propagate_or_empty(prop, a, kf.masks[ki][oi], f, width, height);
                const BinaryMask right =
                    propagate_or_empty(prop, b, kf.masks[ki + 1][oi], f, width, height);
                out.mask(f, oi) = cfg.strategy == FusionStrategy::kBidirectional
                                      ? fuse_pair(left, right, cfg.tau)
                                      : fuse_naive(left, right, cfg.strategy);
            }
        }

        // tail frames past the last keyframe: forward propagation only
        const int last = kf.indices.back();
        for (int f = last + 1; f < frame_count; ++f)
            out.mask(f, oi) =
                propagate_or_empty(prop, last, kf.masks.back()[oi], f, width, height);
    }
    return out;
}

}  // namespace vpoint
