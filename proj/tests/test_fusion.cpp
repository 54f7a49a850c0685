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

#include <doctest.h>

#include "vpoint/fusion.hpp"
#include "vpoint/synth.hpp"

using namespace vpoint;

namespace {

BinaryMask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    return m;
}

BinaryMask random_mask(int w, int h, Rng& rng) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.next_double() < 0.4) m.set(x, y);
    return m;
}

SynthClip moving_scene(int frames, std::uint64_t seed) {
    SceneConfig cfg;
    cfg.width = 40;
    cfg.height = 30;
    cfg.frame_count = frames;
    cfg.objects.push_back({ShapeKind::kEllipse, 10.0, 12.0, 1.2, 0.4, 5.0, 4.0});
    cfg.objects.push_back({ShapeKind::kRectangle, 30.0, 15.0, -0.8, 0.6, 4.0, 5.0});
    return gen_scene(cfg, seed);
}

// propagator that always throws, to exercise the failure path
class BrokenPropagator : public Propagator {
public:
    BinaryMask propagate(int, const BinaryMask&, int) const override {
        throw std::runtime_error("broken");
    }
};

}  // namespace

TEST_CASE("keyframe schedule") {
    CHECK(keyframes(12, 5) == std::vector<int>{0, 5, 10});
    CHECK(keyframes(10, 5) == std::vector<int>{0, 5});
    CHECK(keyframes(1, 5) == std::vector<int>{0});
    CHECK(keyframes(5, 1) == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(keyframes(4, 100) == std::vector<int>{0});
    CHECK_THROWS_AS(keyframes(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(keyframes(5, 0), std::invalid_argument);
}

TEST_CASE("fuse_pair agreement and fallback") {
    const int w = 8, h = 8;
    const BinaryMask a = rect_mask(w, h, 0, 0, 3, 3);  // 16 px
    const BinaryMask b = rect_mask(w, h, 2, 2, 5, 5);  // 16 px, overlap 4 -> IoU 1/7
    const BinaryMask empty(w, h);

    // below tau: union
    CHECK(fuse_pair(a, b, 0.7) == mask_union(a, b));
    // at or above tau: intersection
    CHECK(fuse_pair(a, b, 1.0 / 7.0) == mask_intersect(a, b));
    CHECK(fuse_pair(a, a, 0.7) == a);

    // one side empty falls back to the other
    CHECK(fuse_pair(empty, b, 0.7) == b);
    CHECK(fuse_pair(a, empty, 0.7) == a);
    CHECK(fuse_pair(empty, empty, 0.7) == empty);

    // high-overlap example: 4x4 vs shifted-by-one 4x4 -> IoU 12/20 = 0.6
    const BinaryMask c = rect_mask(w, h, 1, 0, 4, 3);
    CHECK(mask_iou(a, c) == doctest::Approx(0.6));
    CHECK(fuse_pair(a, c, 0.5) == mask_intersect(a, c));
    CHECK(fuse_pair(a, c, 0.7) == mask_union(a, c));
}

TEST_CASE("fuse_pair is symmetric") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask a = random_mask(10, 10, rng);
        const BinaryMask b = random_mask(10, 10, rng);
        for (double tau : {0.0, 0.3, 0.7, 1.0})
            CHECK(fuse_pair(a, b, tau) == fuse_pair(b, a, tau));
    }
}

TEST_CASE("naive strategies") {
    const int w = 8, h = 8;
    const BinaryMask big = rect_mask(w, h, 0, 0, 4, 4);   // 25 px
    const BinaryMask small = rect_mask(w, h, 5, 5, 6, 6); // 4 px
    const BinaryMask empty(w, h);

    CHECK(fuse_naive(big, small, FusionStrategy::kPreferLeft) == big);
    CHECK(fuse_naive(empty, small, FusionStrategy::kPreferLeft) == empty);
    CHECK(fuse_naive(big, small, FusionStrategy::kPreferRight) == small);
    CHECK(fuse_naive(big, empty, FusionStrategy::kPreferRight) == empty);
    CHECK(fuse_naive(big, small, FusionStrategy::kIntersection) == mask_intersect(big, small));
    CHECK(fuse_naive(big, small, FusionStrategy::kLarger) == big);
    CHECK(fuse_naive(big, small, FusionStrategy::kSmaller) == small);

    // cardinality ties go to the left operand
    const BinaryMask left4 = rect_mask(w, h, 0, 0, 1, 1);
    const BinaryMask right4 = rect_mask(w, h, 4, 4, 5, 5);
    CHECK(fuse_naive(left4, right4, FusionStrategy::kLarger) == left4);
    CHECK(fuse_naive(left4, right4, FusionStrategy::kSmaller) == left4);
}

TEST_CASE("strategy names round trip") {
    for (FusionStrategy s : all_strategies()) CHECK(parse_strategy(strategy_name(s)) == s);
    CHECK_THROWS_AS(parse_strategy("bogus"), std::invalid_argument);
}

TEST_CASE("fuse_clip with an exact propagator reproduces the ground truth") {
    const SynthClip clip = moving_scene(13, 3);
    const ExactPropagator prop(clip.gt);
    for (int k : {3, 5, 10}) {
        FusionConfig cfg;
        cfg.k = k;
        const KeyframeSet kf = keyframes_from_clip(clip.gt, k);
        const MaskClip fused = fuse_clip(kf, prop, cfg, clip.gt.frame_count(), clip.gt.width(),
                                         clip.gt.height(), clip.gt.object_ids());
        CHECK(fused == clip.gt);
    }
}

TEST_CASE("exact propagation makes all strategies agree") {
    const SynthClip clip = moving_scene(11, 4);
    const ExactPropagator prop(clip.gt);
    const KeyframeSet kf = keyframes_from_clip(clip.gt, 4);
    FusionConfig cfg;
    cfg.k = 4;
    cfg.strategy = FusionStrategy::kBidirectional;
    const MaskClip ref = fuse_clip(kf, prop, cfg, 11, clip.gt.width(), clip.gt.height(),
                                   clip.gt.object_ids());
    for (FusionStrategy s : all_strategies()) {
        cfg.strategy = s;
        const MaskClip got = fuse_clip(kf, prop, cfg, 11, clip.gt.width(), clip.gt.height(),
                                       clip.gt.object_ids());
        CHECK(got == ref);
    }
}

TEST_CASE("sampling rate at or beyond clip length degenerates to forward-only") {
    const SynthClip clip = moving_scene(8, 5);
    const NoisyPropagator prop(clip.gt, 1.0, 0.0, 99);
    FusionConfig cfg;
    cfg.k = 8;  // single keyframe at 0, every other frame is a tail frame
    const KeyframeSet kf = keyframes_from_clip(clip.gt, 8);
    REQUIRE(kf.indices == std::vector<int>{0});
    const MaskClip fused = fuse_clip(kf, prop, cfg, 8, clip.gt.width(), clip.gt.height(),
                                     clip.gt.object_ids());
    for (int f = 0; f < 8; ++f) {
        for (int o = 0; o < clip.gt.object_count(); ++o) {
            const BinaryMask want =
                f == 0 ? kf.masks[0][o] : prop.propagate(0, kf.masks[0][o], f);
            CHECK(fused.mask(f, o) == want);
        }
    }
}

TEST_CASE("bidirectional output is bracketed by intersection and union") {
    const SynthClip clip = moving_scene(12, 6);
    const NoisyPropagator prop(clip.gt, 1.5, 0.0, 7);
    const KeyframeSet kf = keyframes_from_clip(clip.gt, 5);
    FusionConfig cfg;
    cfg.k = 5;
    const auto run = [&](FusionStrategy s) {
        FusionConfig c = cfg;
        c.strategy = s;
        return fuse_clip(kf, prop, c, 12, clip.gt.width(), clip.gt.height(),
                         clip.gt.object_ids());
    };
    const MaskClip fused = run(FusionStrategy::kBidirectional);
    const MaskClip inter = run(FusionStrategy::kIntersection);
    // intersection(left, right) subset fused: every intersection pixel
    // survives both branches of the pairwise rule
    for (int f = 0; f < 12; ++f)
        for (int o = 0; o < clip.gt.object_count(); ++o)
            for (const PixelPoint& p : inter.mask(f, o).pixels())
                CHECK(fused.mask(f, o).get(p.x, p.y));
}

TEST_CASE("propagator failures degrade to empty masks, never throw") {
    const SynthClip clip = moving_scene(9, 8);
    const BrokenPropagator prop;
    const KeyframeSet kf = keyframes_from_clip(clip.gt, 4);
    FusionConfig cfg;
    cfg.k = 4;
    MaskClip fused;
    CHECK_NOTHROW(fused = fuse_clip(kf, prop, cfg, 9, clip.gt.width(), clip.gt.height(),
                                    clip.gt.object_ids()));
    // keyframes keep their masks, everything else is empty
    for (int o = 0; o < clip.gt.object_count(); ++o) {
        CHECK(fused.mask(0, o) == kf.masks[0][o]);
        CHECK(fused.mask(4, o) == kf.masks[1][o]);
        CHECK(fused.mask(1, o).count() == 0);
        CHECK(fused.mask(7, o).count() == 0);
    }
}

TEST_CASE("fuse_clip validates the keyframe set") {
    const SynthClip clip = moving_scene(6, 9);
    const ExactPropagator prop(clip.gt);
    FusionConfig cfg;
    cfg.k = 3;
    KeyframeSet kf = keyframes_from_clip(clip.gt, 3);
    kf.indices[0] = 1;  // must start at frame 0
    CHECK_THROWS_AS(fuse_clip(kf, prop, cfg, 6, clip.gt.width(), clip.gt.height(),
                              clip.gt.object_ids()),
                    std::invalid_argument);
}
