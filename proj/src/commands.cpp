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

#include "vpoint/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vpoint/benchmark.hpp"
#include "vpoint/metrics.hpp"
#include "vpoint/report.hpp"
#include "vpoint/synth.hpp"
#include "vpoint/temporal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vpoint::cli {

namespace {

std::string resolve_output(const std::string& path) {
    const char* root = std::getenv(kOutRootEnv);
    if (root && *root && fs::path(path).is_relative()) return (fs::path(root) / path).string();
    return path;
}

void write_manifest(const json& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << manifest.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

std::string clip_name(const std::string& dir) {
    fs::path p(dir);
    if (p.filename().empty()) p = p.parent_path();
    return p.filename().string();
}

// --- synth --------------------------------------------------------------

int synth_impl(const json& config, std::uint64_t seed, const std::string& out_dir,
               std::ostream& log) {
    const bool multi = config.contains("clips");
    std::vector<json> scenes;
    if (multi)
        for (const auto& s : config.at("clips")) scenes.push_back(s);
    else
        scenes.push_back(config);

    fs::create_directories(out_dir);
    json outputs = json::array();
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const SceneConfig cfg = scene_config_from_json(scenes[i]);
        const SynthClip clip = gen_scene(cfg, seed);
        char name[32];
        std::snprintf(name, sizeof(name), "clip_%03zu", i);
        const std::string dir = multi ? (fs::path(out_dir) / name).string() : out_dir;
        write_clip(clip.gt, dir);
        write_annotations(clip.gt_points, clip_name(dir), (fs::path(dir) / "gt_points.csv").string());
        outputs.push_back({{"dir", multi ? name : "."},
                           {"frames", cfg.frame_count},
                           {"count", clip.gt_count}});
        log << "wrote " << dir << " (objects: " << clip.gt_count << ")\n";
    }

    json manifest;
    manifest["command"] = "synth";
    manifest["version"] = kVersion;
    manifest["config"] = {{"scene", config}, {"seed", seed}};
    manifest["outputs"] = {{"dir", out_dir}, {"clips", outputs}};
    write_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return kExitOk;
}

// --- fuse ---------------------------------------------------------------

int fuse_impl(const FuseOptions& opt, std::ostream& log) {
    const std::string out_dir = resolve_output(opt.out_dir);
    const MaskClip gt = read_clip(opt.clip_dir);
    FusionConfig cfg;
    cfg.k = opt.k;
    cfg.tau = opt.tau;
    cfg.strategy = parse_strategy(opt.strategy);
    if (cfg.tau < 0.0 || cfg.tau > 1.0) throw std::invalid_argument("tau must be in [0, 1]");

    const KeyframeSet kf = keyframes_from_clip(gt, cfg.k);
    MaskClip fused;
    if (opt.propagator == "exact") {
        const ExactPropagator prop(gt);
        fused = fuse_clip(kf, prop, cfg, gt.frame_count(), gt.width(), gt.height(), gt.object_ids());
    } else if (opt.propagator == "noisy") {
        const NoisyPropagator prop(gt, opt.jitter, opt.dropout, opt.seed);
        fused = fuse_clip(kf, prop, cfg, gt.frame_count(), gt.width(), gt.height(), gt.object_ids());
    } else {
        throw std::invalid_argument("unknown propagator: " + opt.propagator);
    }
    write_clip(fused, out_dir);

    json manifest;
    manifest["command"] = "fuse";
    manifest["version"] = kVersion;
    manifest["config"] = {{"clip_dir", opt.clip_dir}, {"k", opt.k},       {"tau", opt.tau},
                          {"strategy", opt.strategy}, {"propagator", opt.propagator},
                          {"jitter", opt.jitter},     {"dropout", opt.dropout},
                          {"seed", opt.seed},         {"out_dir", opt.out_dir}};
    manifest["outputs"] = {{"dir", out_dir}};
    write_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    log << "fused " << gt.frame_count() << " frames to " << out_dir << "\n";
    return kExitOk;
}

// --- annotate -----------------------------------------------------------

int annotate_impl(const AnnotateOptions& opt, std::ostream& log) {
    const std::string out_file = resolve_output(opt.out_file);
    const MaskClip gt = read_clip(opt.clip_dir);
    const std::vector<LabelImage> frames = read_clip_frames(opt.clip_dir);
    const LabelSegmentOracle oracle(frames);
    const AnnotationResult result = annotate_clip(gt, opt.candidates, oracle, opt.seed);

    for (const AnnotationFailure& f : result.failures)
        log << "annotation failed (frame " << f.frame << ", object " << f.object
            << "): " << f.message << "\n";
    if (result.annotations.empty() && !result.failures.empty())
        throw std::runtime_error("all annotations failed");

    write_annotations(result.annotations, clip_name(opt.clip_dir), out_file);

    json manifest;
    manifest["command"] = "annotate";
    manifest["version"] = kVersion;
    manifest["config"] = {{"clip_dir", opt.clip_dir},
                          {"candidates", opt.candidates},
                          {"seed", opt.seed},
                          {"out_file", opt.out_file}};
    manifest["outputs"] = {{"file", out_file},
                           {"annotations", result.annotations.size()},
                           {"failures", result.failures.size()}};
    write_manifest(manifest, out_file + ".manifest.json");
    log << "wrote " << result.annotations.size() << " annotations to " << out_file << "\n";
    return kExitOk;
}

// --- eval ---------------------------------------------------------------

std::pair<std::vector<int>, std::vector<int>> read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open counts file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "pred,gt")
        throw std::runtime_error("bad counts header in " + path);
    std::vector<int> preds, gts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        preds.push_back(std::stoi(field));
        std::getline(ss, field, ',');
        gts.push_back(std::stoi(field));
    }
    return {preds, gts};
}

int eval_impl(const EvalOptions& opt, std::ostream& log) {
    const std::string report_path = resolve_output(opt.report_path);
    const MaskClip pred = read_clip(opt.pred_dir);
    const MaskClip gt = read_clip(opt.gt_dir);
    const SegScore seg = jf(pred, gt);

    Report report;
    report.dataset = clip_name(opt.gt_dir);
    report.j = seg.j;
    report.f = seg.f;
    report.jf = seg.jf;
    report.strategy = "-";

    // echo fusion knobs when the prediction directory carries a manifest
    const fs::path pred_manifest = fs::path(opt.pred_dir) / "manifest.json";
    if (fs::exists(pred_manifest)) {
        const json m = read_json_file(pred_manifest.string());
        if (m.value("command", "") == "fuse") {
            report.strategy = m["config"].value("strategy", "-");
            report.tau = m["config"].value("tau", 0.0);
            report.k = m["config"].value("k", 0);
        }
    }

    if (!opt.points_file.empty()) {
        const std::vector<PointAnnotation> anns = read_annotations(opt.points_file);
        std::vector<FramePoint> points;
        points.reserve(anns.size());
        for (const PointAnnotation& a : anns) points.push_back({a.frame, a.x, a.y});
        const PointScore ps = point_prf(points, gt);
        report.precision = ps.precision;
        report.recall = ps.recall;
        report.f1 = ps.f1;
    }
    if (!opt.counts_file.empty()) {
        const auto [preds, gts] = read_counts_csv(opt.counts_file);
        const CountScore cs = counting(preds, gts);
        report.mae = cs.mae;
        report.ema = cs.ema;
    }

    write_report(report, report_path);
    log << render_report_table(report);

    json manifest;
    manifest["command"] = "eval";
    manifest["version"] = kVersion;
    manifest["config"] = {{"pred_dir", opt.pred_dir},
                          {"gt_dir", opt.gt_dir},
                          {"points_file", opt.points_file},
                          {"counts_file", opt.counts_file},
                          {"report_path", opt.report_path}};
    manifest["outputs"] = {{"report", report_path}};
    write_manifest(manifest, report_path + ".manifest.json");
    return kExitOk;
}

// --- sweep --------------------------------------------------------------

int sweep_impl(const json& config, const std::string& out_dir, std::ostream& log) {
    BenchmarkSpec spec;
    spec.clips = config.value("clips", 20);
    spec.width = config.value("width", 64);
    spec.height = config.value("height", 64);
    spec.frames = config.value("frames", 24);
    spec.min_objects = config.value("min_objects", 1);
    spec.max_objects = config.value("max_objects", 3);
    spec.jitter = config.value("jitter", 1.0);
    spec.dropout = config.value("dropout", 0.1);
    spec.seed = config.value("seed", std::uint64_t{42});
    const std::string dataset = config.value("dataset", "synthetic");

    const json grid = config.value("grid", json::object());
    const auto taus = grid.value("tau", std::vector<double>{kDefaultTau});
    const auto ks = grid.value("k", std::vector<int>{kDefaultSamplingRate});
    const auto strategies = grid.value("strategy", std::vector<std::string>{"bidirectional"});
    const auto ls = grid.value("l", std::vector<int>{static_cast<int>(kDefaultContextLength)});
    if (taus.empty() || ks.empty() || strategies.empty() || ls.empty())
        throw std::invalid_argument("sweep: empty grid");

    const std::vector<SynthClip> clips = benchmark_clips(spec);
    fs::create_directories(out_dir);

    json summary = json::array();
    std::size_t idx = 0;
    for (const std::string& strategy : strategies) {
        for (double tau : taus) {
            for (int k : ks) {
                for (int l : ls) {
                    FusionConfig cfg;
                    cfg.k = k;
                    cfg.tau = tau;
                    cfg.strategy = parse_strategy(strategy);
                    const SegScore s = benchmark_score(clips, spec, cfg);

                    Report r;
                    r.dataset = dataset;
                    r.strategy = strategy;
                    r.tau = tau;
                    r.k = k;
                    r.j = s.j;
                    r.f = s.f;
                    r.jf = s.jf;
                    r.extra = {{"l", l},
                               {"clips", spec.clips},
                               {"jitter", spec.jitter},
                               {"dropout", spec.dropout},
                               {"seed", spec.seed}};
                    char name[32];
                    std::snprintf(name, sizeof(name), "report_%04zu.json", idx);
                    write_report(r, (fs::path(out_dir) / name).string());
                    summary.push_back({{"report", name},
                                       {"strategy", strategy},
                                       {"tau", tau},
                                       {"k", k},
                                       {"l", l},
                                       {"jf", s.jf}});
                    log << name << "  strategy=" << strategy << " tau=" << tau << " k=" << k
                        << " l=" << l << "  J&F=" << s.jf << "\n";
                    ++idx;
                }
            }
        }
    }

    std::ofstream sf(fs::path(out_dir) / "summary.json");
    sf << json{{"grid_points", summary}}.dump(2) << "\n";

    json manifest;
    manifest["command"] = "sweep";
    manifest["version"] = kVersion;
    manifest["config"] = {{"sweep", config}, {"out_dir", out_dir}};
    manifest["outputs"] = {{"dir", out_dir}, {"reports", idx}};
    write_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return kExitOk;
}

// --- attn-check ----------------------------------------------------------

int attn_check_impl(const AttnCheckOptions& opt, std::ostream& log) {
    if (opt.dim == 0 || opt.heads == 0 || opt.dim % opt.heads != 0) {
        log << "invalid shape: dim " << opt.dim << " is not a multiple of heads " << opt.heads
            << "\n";
        return kExitInputError;
    }
    if (opt.windows == 0 || opt.step <= 0.0) {
        log << "invalid shape: windows and step must be positive\n";
        return kExitInputError;
    }

    Rng rng(Rng::derive(opt.seed, 1));
    auto random_windows = [&rng](std::size_t w, std::size_t d) {
        Tensor t = Tensor::zeros({w, 4, d});
        for (double& x : t.v) x = rng.next_uniform(-1.0, 1.0);
        return t;
    };
    const Tensor f = random_windows(opt.windows, opt.dim);
    const Tensor fctx = random_windows(opt.windows, opt.dim);
    const PipelineParams params =
        init_pipeline_params(opt.dim, opt.heads, opt.dim, Rng::derive(opt.seed, 2), false);
    const std::size_t target = 0;

    const GradCheckResult gc = grad_check(f, fctx, params, target, opt.step);

    double softmax_residual = 0.0;
    const std::vector<double> attn = mhca_attention(f, fctx, params.mhca);
    for (std::size_t row = 0; row < attn.size() / 4; ++row) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) sum += attn[row * 4 + c];
        softmax_residual = std::max(softmax_residual, std::abs(sum - 1.0));
    }
    const Tensor enriched = temporal_enrich(f, fctx, params.mhca);
    const std::vector<double> pool_w = attn_pool_weights(enriched, params.pool);
    for (std::size_t row = 0; row < pool_w.size() / 4; ++row) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) sum += pool_w[row * 4 + c];
        softmax_residual = std::max(softmax_residual, std::abs(sum - 1.0));
    }

    PipelineParams cold = params;
    std::fill(cold.mhca.wo.begin(), cold.mhca.wo.end(), 0.0);
    std::fill(cold.mhca.bo.begin(), cold.mhca.bo.end(), 0.0);
    const bool residual_identity = temporal_enrich(f, fctx, cold.mhca) == f;

    const bool grad_ok = gc.max_rel_err <= 1e-4;
    const bool softmax_ok = softmax_residual <= 1e-9;
    log << "max relative gradient error: " << gc.max_rel_err << " (worst: " << gc.worst_name
        << ") " << (grad_ok ? "PASS" : "FAIL") << "\n";
    log << "softmax normalization residual: " << softmax_residual << " "
        << (softmax_ok ? "PASS" : "FAIL") << "\n";
    log << "zero-init residual identity: " << (residual_identity ? "exact PASS" : "FAIL") << "\n";

    if (!opt.report_path.empty()) {
        const std::string report_path = resolve_output(opt.report_path);
        json report;
        report["max_rel_grad_err"] = gc.max_rel_err;
        report["worst_param"] = gc.worst_name;
        report["softmax_residual"] = softmax_residual;
        report["residual_identity"] = residual_identity;
        report["pass"] = grad_ok && softmax_ok && residual_identity;
        std::ofstream out(report_path);
        out << report.dump(2) << "\n";

        json manifest;
        manifest["command"] = "attn-check";
        manifest["version"] = kVersion;
        manifest["config"] = {{"heads", opt.heads},   {"dim", opt.dim},
                              {"windows", opt.windows}, {"step", opt.step},
                              {"seed", opt.seed},     {"report_path", opt.report_path}};
        manifest["outputs"] = {{"report", report_path}};
        write_manifest(manifest, report_path + ".manifest.json");
    }
    return (grad_ok && softmax_ok && residual_identity) ? kExitOk : kExitVerifyFailure;
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace

int cmd_synth(const SynthOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        return synth_impl(read_json_file(opt.config_path), opt.seed, resolve_output(opt.out_dir),
                          log);
    });
}

int cmd_annotate(const AnnotateOptions& opt, std::ostream& log) {
    return guarded(log, [&] { return annotate_impl(opt, log); });
}

int cmd_fuse(const FuseOptions& opt, std::ostream& log) {
    return guarded(log, [&] { return fuse_impl(opt, log); });
}

int cmd_eval(const EvalOptions& opt, std::ostream& log) {
    return guarded(log, [&] { return eval_impl(opt, log); });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        return sweep_impl(read_json_file(opt.config_path), resolve_output(opt.out_dir), log);
    });
}

int cmd_attn_check(const AttnCheckOptions& opt, std::ostream& log) {
    return guarded(log, [&] { return attn_check_impl(opt, log); });
}

int cmd_rerun(const std::string& manifest_path, std::ostream& log) {
    return guarded(log, [&]() -> int {
        const json m = read_json_file(manifest_path);
        const std::string command = m.at("command").get<std::string>();
        const json& cfg = m.at("config");
        if (command == "synth")
            return synth_impl(cfg.at("scene"), cfg.at("seed").get<std::uint64_t>(),
                              m.at("outputs").at("dir").get<std::string>(), log);
        if (command == "annotate") {
            AnnotateOptions opt;
            opt.clip_dir = cfg.at("clip_dir");
            opt.candidates = cfg.at("candidates");
            opt.seed = cfg.at("seed");
            opt.out_file = cfg.at("out_file");
            return annotate_impl(opt, log);
        }
        if (command == "fuse") {
            FuseOptions opt;
            opt.clip_dir = cfg.at("clip_dir");
            opt.k = cfg.at("k");
            opt.tau = cfg.at("tau");
            opt.strategy = cfg.at("strategy");
            opt.propagator = cfg.at("propagator");
            opt.jitter = cfg.at("jitter");
            opt.dropout = cfg.at("dropout");
            opt.seed = cfg.at("seed");
            opt.out_dir = cfg.at("out_dir");
            return fuse_impl(opt, log);
        }
        if (command == "eval") {
            EvalOptions opt;
            opt.pred_dir = cfg.at("pred_dir");
            opt.gt_dir = cfg.at("gt_dir");
            opt.points_file = cfg.at("points_file");
            opt.counts_file = cfg.at("counts_file");
            opt.report_path = cfg.at("report_path");
            return eval_impl(opt, log);
        }
        if (command == "sweep")
            return sweep_impl(cfg.at("sweep"), cfg.at("out_dir").get<std::string>(), log);
        if (command == "attn-check") {
            AttnCheckOptions opt;
            opt.heads = cfg.at("heads");
            opt.dim = cfg.at("dim");
            opt.windows = cfg.at("windows");
            opt.step = cfg.at("step");
            opt.seed = cfg.at("seed");
            opt.report_path = cfg.at("report_path");
            return attn_check_impl(opt, log);
        }
        throw std::runtime_error("unknown command in manifest: " + command);
    });
}

}  // namespace vpoint::cli
