// Seeded noisy-propagator fusion benchmark over synthetic clips.
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
#include <vector>

#include "vpoint/fusion.hpp"
#include "vpoint/metrics.hpp"
#include "vpoint/synth.hpp"

namespace vpoint {

struct BenchmarkSpec {
    int clips = 100;
    int width = 64;
    int height = 64;
    int frames = 24;
    int min_objects = 1;
    int max_objects = 3;
    double jitter = 1.0;
    double dropout = 0.1;
    std::uint64_t seed = 42;
};

/// Deterministic clip suite; clip i depends only on (spec, seed, i).
std::vector<SynthClip> benchmark_clips(const BenchmarkSpec& spec);

/// Keyframes the ground truth at rate cfg.k, fuses through a noisy
/// propagator, and scores J&F against ground truth, averaged over clips.
SegScore benchmark_score(const std::vector<SynthClip>& clips, const BenchmarkSpec& spec,
                         const FusionConfig& cfg);

}  // namespace vpoint
