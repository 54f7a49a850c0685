// Deterministic synthetic clips of moving shapes with exact ground
// truth, plus reference propagators and a segment-from-point oracle.
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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpoint/annotator.hpp"
#include "vpoint/clip.hpp"
#include "vpoint/fusion.hpp"
#include "vpoint/mask.hpp"
#include "vpoint/rng.hpp"

namespace vpoint {

enum class ShapeKind { kEllipse, kRectangle };

struct ObjectConfig {
    ShapeKind shape = ShapeKind::kEllipse;
    double x = 0.0, y = 0.0;       // start center, pixels
    double vx = 0.0, vy = 0.0;     // pixels per frame
    double rx = 1.0, ry = 1.0;     // half extents
};

struct NoiseConfig {
    double jitter = 0.0;   // translation std-dev scale, pixels
    double dropout = 0.0;  // probability of an empty propagation
};

struct SceneConfig {
    int width = 64;
    int height = 64;
    int frame_count = 1;
    std::vector<ObjectConfig> objects;
    NoiseConfig noise;
};

SceneConfig scene_config_from_json_file(const std::string& path);
SceneConfig scene_config_from_json(const nlohmann::json& j);
nlohmann::json scene_config_to_json(const SceneConfig& cfg);
void write_scene_config(const SceneConfig& cfg, const std::string& path);

struct SynthClip {
    std::vector<LabelImage> label_frames;  // pixel = object id, 0 background
    MaskClip gt;
    std::vector<PointAnnotation> gt_points;  // deepest interior point per (frame, object)
    int gt_count = 0;                        // distinct object ids present
};

/// Deterministic rasterization; identical (cfg, seed) give bit-identical
/// clips. Later objects are clipped against earlier ones so gt masks are
/// pairwise disjoint.
SynthClip gen_scene(const SceneConfig& cfg, std::uint64_t seed);

/// Seeded random scene of moving ellipses/rectangles, for benchmark
/// suites; object count drawn uniformly from [min_objects, max_objects].
SceneConfig random_scene_config(Rng& rng, int width, int height, int frame_count,
                                int min_objects, int max_objects);

/// Returns the matched object's ground-truth mask at the target frame
/// (source object identified by maximal IoU; IoU 0 with every object
/// gives an empty mask).
class ExactPropagator : public Propagator {
public:
    explicit ExactPropagator(const MaskClip& gt) : gt_(&gt) {}
    BinaryMask propagate(int source_frame, const BinaryMask& source_mask,
                         int target_frame) const override;

protected:
    int identify_object(int frame, const BinaryMask& mask) const;
    const MaskClip* gt_;
};

/// Exact propagation degraded by a seeded integer translation (std-dev
/// jitter * sqrt(|target - source|)) and replaced by the empty mask with
/// probability dropout; deterministic per (seed, source, target, object).
class NoisyPropagator : public ExactPropagator {
public:
    NoisyPropagator(const MaskClip& gt, double jitter, double dropout, std::uint64_t seed)
        : ExactPropagator(gt), jitter_(jitter), dropout_(dropout), seed_(seed) {}
    BinaryMask propagate(int source_frame, const BinaryMask& source_mask,
                         int target_frame) const override;

private:
    double jitter_;
    double dropout_;
    std::uint64_t seed_;
};

/// Flood-fills the label frame at the prompt; background points yield
/// empty masks.
class LabelSegmentOracle : public SegmentOracle {
public:
    explicit LabelSegmentOracle(const std::vector<LabelImage>& frames) : frames_(&frames) {}
    BinaryMask segment(int frame, PixelPoint point) const override;

private:
    const std::vector<LabelImage>* frames_;
};

}  // namespace vpoint
