// Command implementations behind the CLI: synth, annotate, fuse, eval,
// sweep, attn-check, and manifest-driven reruns.
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
#include <ostream>
#include <string>

#include "vpoint/annotator.hpp"
#include "vpoint/fusion.hpp"

namespace vpoint::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitVerifyFailure = 3;

/// Environment variable naming the default root for relative output paths.
inline constexpr const char* kOutRootEnv = "VPOINT_OUT_ROOT";

struct SynthOptions {
    std::string config_path;  // single scene or {"clips": [scene, ...]}
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct AnnotateOptions {
    std::string clip_dir;
    int candidates = kDefaultCandidateCount;
    std::uint64_t seed = 0;
    std::string out_file;
};

struct FuseOptions {
    std::string clip_dir;  // keyframe masks are sampled from this clip
    int k = kDefaultSamplingRate;
    double tau = kDefaultTau;
    std::string strategy = "bidirectional";
    std::string propagator = "exact";  // exact | noisy
    double jitter = 1.0;
    double dropout = 0.1;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct EvalOptions {
    std::string pred_dir;
    std::string gt_dir;
    std::string points_file;  // optional
    std::string counts_file;  // optional, CSV pred,gt
    std::string report_path;
};

struct SweepOptions {
    std::string config_path;
    std::string out_dir;
};

struct AttnCheckOptions {
    std::size_t heads = 2;
    std::size_t dim = 8;
    std::size_t windows = 3;
    double step = 1e-5;
    std::uint64_t seed = 7;
    std::string report_path;  // optional
};

int cmd_synth(const SynthOptions& opt, std::ostream& log);
int cmd_annotate(const AnnotateOptions& opt, std::ostream& log);
int cmd_fuse(const FuseOptions& opt, std::ostream& log);
int cmd_eval(const EvalOptions& opt, std::ostream& log);
int cmd_sweep(const SweepOptions& opt, std::ostream& log);
int cmd_attn_check(const AttnCheckOptions& opt, std::ostream& log);

/// Re-executes the command recorded in a manifest; outputs are
/// byte-identical to the original run on the same platform.
int cmd_rerun(const std::string& manifest_path, std::ostream& log);

}  // namespace vpoint::cli
