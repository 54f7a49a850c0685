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

#include "vpoint/benchmark.hpp"

namespace vpoint {

std::vector<SynthClip> benchmark_clips(const BenchmarkSpec& spec) {
    std::vector<SynthClip> clips;
    clips.reserve(spec.clips);
    for (int i = 0; i < spec.clips; ++i) {
        Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(i)));
        const SceneConfig cfg = random_scene_config(rng, spec.width, spec.height, spec.frames,
                                                    spec.min_objects, spec.max_objects);
        clips.push_back(gen_scene(cfg, spec.seed));
    }
    return clips;
}

SegScore benchmark_score(const std::vector<SynthClip>& clips, const BenchmarkSpec& spec,
                         const FusionConfig& cfg) {
    double j_sum = 0.0, f_sum = 0.0;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const MaskClip& gt = clips[i].gt;
        const KeyframeSet kf = keyframes_from_clip(gt, cfg.k);
        const NoisyPropagator prop(gt, spec.jitter, spec.dropout,
                                   Rng::derive(spec.seed, static_cast<std::uint64_t>(i), 1));
        const MaskClip pred = fuse_clip(kf, prop, cfg, gt.frame_count(), gt.width(), gt.height(),
                                        gt.object_ids());
        const SegScore s = jf(pred, gt);
        j_sum += s.j;
        f_sum += s.f;
    }
    SegScore out;
    out.j = j_sum / static_cast<double>(clips.size());
    out.f = f_sum / static_cast<double>(clips.size());
    out.jf = (out.j + out.f) / 2.0;
    return out;
}

}  // namespace vpoint
