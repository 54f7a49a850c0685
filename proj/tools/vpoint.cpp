// vpoint CLI: synthetic clip generation, point annotation, temporal mask
// fusion, evaluation, ablation sweeps, and attention verification.
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

#include <iostream>

#include <CLI11.hpp>

#include "vpoint/commands.hpp"

int main(int argc, char** argv) {
    using namespace vpoint::cli;
    CLI::App app{"video point grounding toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic clip suite");
    synth_cmd->add_option("config", synth.config_path, "scene config JSON")->required();
    synth_cmd->add_option("--seed", synth.seed, "random seed");
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();

    AnnotateOptions annotate;
    auto* annotate_cmd = app.add_subcommand("annotate", "generate point annotations for a clip");
    annotate_cmd->add_option("clip", annotate.clip_dir, "clip directory")->required();
    annotate_cmd->add_option("--candidates", annotate.candidates, "candidate points per object");
    annotate_cmd->add_option("--seed", annotate.seed, "random seed");
    annotate_cmd->add_option("--out", annotate.out_file, "annotation file")->required();

    FuseOptions fuse;
    auto* fuse_cmd = app.add_subcommand("fuse", "propagate keyframe masks to dense masks");
    fuse_cmd->add_option("clip", fuse.clip_dir, "keyframe source clip directory")->required();
    fuse_cmd->add_option("--k", fuse.k, "frame sampling rate");
    fuse_cmd->add_option("--tau", fuse.tau, "IoU agreement threshold");
    fuse_cmd->add_option("--strategy", fuse.strategy,
                         "bidirectional|prefer-left|prefer-right|intersection|larger|smaller");
    fuse_cmd->add_option("--propagator", fuse.propagator, "exact|noisy");
    fuse_cmd->add_option("--jitter", fuse.jitter, "noisy propagator jitter (pixels)");
    fuse_cmd->add_option("--dropout", fuse.dropout, "noisy propagator dropout probability");
    fuse_cmd->add_option("--seed", fuse.seed, "random seed");
    fuse_cmd->add_option("--out", fuse.out_dir, "output clip directory")->required();

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    eval_cmd->add_option("pred", eval.pred_dir, "prediction clip directory")->required();
    eval_cmd->add_option("gt", eval.gt_dir, "ground-truth clip directory")->required();
    eval_cmd->add_option("--points", eval.points_file, "predicted points CSV (optional)");
    eval_cmd->add_option("--counts", eval.counts_file, "pred,gt counts CSV (optional)");
    eval_cmd->add_option("--report", eval.report_path, "report JSON output")->required();

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over fusion parameters");
    sweep_cmd->add_option("config", sweep.config_path, "benchmark config JSON")->required();
    sweep_cmd->add_option("--out", sweep.out_dir, "output directory")->required();

    AttnCheckOptions attn;
    auto* attn_cmd = app.add_subcommand("attn-check", "verify the temporal attention module");
    attn_cmd->add_option("--heads", attn.heads, "attention heads");
    attn_cmd->add_option("--dim", attn.dim, "channel dimension");
    attn_cmd->add_option("--windows", attn.windows, "number of 2x2 windows");
    attn_cmd->add_option("--step", attn.step, "finite-difference step");
    attn_cmd->add_option("--seed", attn.seed, "random seed");
    attn_cmd->add_option("--report", attn.report_path, "report JSON output (optional)");

    std::string manifest_path;
    auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a command from its manifest");
    rerun_cmd->add_option("manifest", manifest_path, "manifest JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) return cmd_synth(synth, std::cout);
    if (annotate_cmd->parsed()) return cmd_annotate(annotate, std::cout);
    if (fuse_cmd->parsed()) return cmd_fuse(fuse, std::cout);
    if (eval_cmd->parsed()) return cmd_eval(eval, std::cout);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, std::cout);
    if (attn_cmd->parsed()) return cmd_attn_check(attn, std::cout);
    if (rerun_cmd->parsed()) return cmd_rerun(manifest_path, std::cout);
    return kExitInputError;
}
