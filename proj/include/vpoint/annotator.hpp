// Semi-automatic point annotation: boundary-distance-weighted candidate
// sampling, oracle scoring, argmax-IoU point selection.
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
#include "vpoint/rng.hpp"

namespace vpoint {

struct PointAnnotation {
    int frame = 0;
    int object = 0;   // object id
    double x = 0.0;   // percent of width, [0, 100]
    double y = 0.0;   // percent of height, [0, 100]
};

/// Maps a point prompt at a frame to a full object mask. Implementations
/// must be deterministic and return masks of the frame's dimensions.
class SegmentOracle {
public:
    virtual ~SegmentOracle() = default;
    virtual BinaryMask segment(int frame, PixelPoint point) const = 0;
};

struct CandidateSet {
    std::vector<PixelPoint> points;
    std::vector<double> weights;  // sampling weight of each drawn point
};

struct AnnotationFailure {
    int frame = 0;
    int object = 0;
    std::string message;
};

struct AnnotationResult {
    std::vector<PointAnnotation> annotations;
    std::vector<AnnotationFailure> failures;
};

inline constexpr int kDefaultCandidateCount = 5;

/// Draws k points (with replacement) from the mask's pixels with
/// probability proportional to the distance to the nearest boundary
/// pixel. All-boundary masks fall back to uniform sampling.
CandidateSet sample_candidates(const BinaryMask& m, int k, Rng& rng);

/// Candidate maximizing IoU(oracle mask, gt); ties broken by lowest index.
PixelPoint select_point(const BinaryMask& m_gt, const CandidateSet& cands,
                        const SegmentOracle& oracle, int frame);

/// One annotation per (frame, object) with a nonempty gt mask, percent
/// coordinates; deterministic given the seed. Per-object oracle failures
/// are collected, not fatal.
AnnotationResult annotate_clip(const MaskClip& gt, int candidate_count,
                               const SegmentOracle& oracle, std::uint64_t seed);

/// Annotation file: header then one CSV record per line,
/// video,frame,object,x,y with percent coordinates at 2 decimals.
void write_annotations(const std::vector<PointAnnotation>& annotations,
                       const std::string& video, const std::string& path);
std::vector<PointAnnotation> read_annotations(const std::string& path,
                                              std::string* video = nullptr);

}  // namespace vpoint
