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

#include "vpoint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "vpoint/coords.hpp"
#include "vpoint/rng.hpp"

namespace vpoint {

namespace {

ShapeKind parse_shape(const std::string& s) {
    if (s == "ellipse") return ShapeKind::kEllipse;
    if (s == "rectangle") return ShapeKind::kRectangle;
    throw std::invalid_argument("unknown shape: " + s);
}

std::string shape_name(ShapeKind k) {
    return k == ShapeKind::kEllipse ? "ellipse" : "rectangle";
}

}  // namespace

SceneConfig scene_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene config: " + path);
    return scene_config_from_json(nlohmann::json::parse(in));
}

SceneConfig scene_config_from_json(const nlohmann::json& j) {
    SceneConfig cfg;
    cfg.width = j.at("width").get<int>();
    cfg.height = j.at("height").get<int>();
    cfg.frame_count = j.at("frames").get<int>();
    for (const auto& o : j.at("objects")) {
        ObjectConfig oc;
        oc.shape = parse_shape(o.at("shape").get<std::string>());
        oc.x = o.at("x").get<double>();
        oc.y = o.at("y").get<double>();
        oc.vx = o.value("vx", 0.0);
        oc.vy = o.value("vy", 0.0);
        oc.rx = o.at("rx").get<double>();
        oc.ry = o.at("ry").get<double>();
        cfg.objects.push_back(oc);
    }
    if (j.contains("noise")) {
        cfg.noise.jitter = j["noise"].value("jitter", 0.0);
        cfg.noise.dropout = j["noise"].value("dropout", 0.0);
    }
    if (cfg.frame_count < 1) throw std::invalid_argument("scene config: frames must be >= 1");
    if (cfg.noise.dropout < 0.0 || cfg.noise.dropout > 1.0)
        throw std::invalid_argument("scene config: dropout must be in [0, 1]");
    return cfg;
}

nlohmann::json scene_config_to_json(const SceneConfig& cfg) {
    nlohmann::json j;
    j["width"] = cfg.width;
    j["height"] = cfg.height;
    j["frames"] = cfg.frame_count;
    j["objects"] = nlohmann::json::array();
    for (const ObjectConfig& o : cfg.objects) {
        j["objects"].push_back({{"shape", shape_name(o.shape)},
                                {"x", o.x},
                                {"y", o.y},
                                {"vx", o.vx},
                                {"vy", o.vy},
                                {"rx", o.rx},
                                {"ry", o.ry}});
    }
    j["noise"] = {{"jitter", cfg.noise.jitter}, {"dropout", cfg.noise.dropout}};
    return j;
}

void write_scene_config(const SceneConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scene config: " + path);
    out << scene_config_to_json(cfg).dump(2) << "\n";
}

SynthClip gen_scene(const SceneConfig& cfg, std::uint64_t /*seed*/) {
    if (cfg.frame_count < 1) throw std::invalid_argument("gen_scene: frames must be >= 1");
    for (const ObjectConfig& o : cfg.objects)
        if (o.rx <= 0.0 || o.ry <= 0.0)
            throw std::invalid_argument("gen_scene: zero-size object");

    SynthClip clip;
    clip.label_frames.reserve(cfg.frame_count);
    for (int t = 0; t < cfg.frame_count; ++t) {
        LabelImage frame(cfg.width, cfg.height);
        for (std::size_t oi = 0; oi < cfg.objects.size(); ++oi) {
            const ObjectConfig& o = cfg.objects[oi];
            const auto id = static_cast<std::uint8_t>(oi + 1);
            // clamp the center so the shape stays inside the image
            const double cx = std::clamp(o.x + o.vx * t, o.rx, cfg.width - o.rx);
            const double cy = std::clamp(o.y + o.vy * t, o.ry, cfg.height - o.ry);
            const int x0 = std::max(0, static_cast<int>(std::floor(cx - o.rx)));
            const int x1 = std::min(cfg.width - 1, static_cast<int>(std::ceil(cx + o.rx)));
            const int y0 = std::max(0, static_cast<int>(std::floor(cy - o.ry)));
            const int y1 = std::min(cfg.height - 1, static_cast<int>(std::ceil(cy + o.ry)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    if (frame.at(x, y) != 0) continue;  // earlier objects win overlaps
                    const double dx = (x + 0.5 - cx);
                    const double dy = (y + 0.5 - cy);
                    bool inside;
                    if (o.shape == ShapeKind::kEllipse)
                        inside = (dx * dx) / (o.rx * o.rx) + (dy * dy) / (o.ry * o.ry) <= 1.0;
                    else
                        inside = std::abs(dx) <= o.rx && std::abs(dy) <= o.ry;
                    if (inside) frame.set(x, y, id);
                }
            }
        }
        clip.label_frames.push_back(std::move(frame));
    }

    std::vector<int> roster(cfg.objects.size());
    for (std::size_t i = 0; i < roster.size(); ++i) roster[i] = static_cast<int>(i + 1);
    clip.gt = clip_from_labels(clip.label_frames, roster);

    std::set<int> present;
    for (int f = 0; f < clip.gt.frame_count(); ++f) {
        for (int oi = 0; oi < clip.gt.object_count(); ++oi) {
            const BinaryMask& m = clip.gt.mask(f, oi);
            if (m.empty()) continue;
            present.insert(clip.gt.object_ids()[oi]);
            // deepest interior pixel, first in row-major order on ties
            const DistanceField field = distance_to_boundary(m);
            PixelPoint best{0, 0};
            double best_d = -1.0;
            for (const PixelPoint& p : m.pixels()) {
                const double d = field.at(p.x, p.y);
                if (d > best_d) {
                    best_d = d;
                    best = p;
                }
            }
            clip.gt_points.push_back({f, clip.gt.object_ids()[oi],
                                      pixel_to_percent(best.x, cfg.width),
                                      pixel_to_percent(best.y, cfg.height)});
        }
    }
    clip.gt_count = static_cast<int>(present.size());
    return clip;
}

SceneConfig random_scene_config(Rng& rng, int width, int height, int frame_count,
                                int min_objects, int max_objects) {
    if (min_objects < 1 || max_objects < min_objects)
        throw std::invalid_argument("random_scene_config: bad object range");
    SceneConfig cfg;
    cfg.width = width;
    cfg.height = height;
    cfg.frame_count = frame_count;
    const int count = min_objects + static_cast<int>(rng.next_below(
                                        static_cast<std::uint64_t>(max_objects - min_objects + 1)));
    for (int i = 0; i < count; ++i) {
        ObjectConfig o;
        o.shape = rng.next_below(2) == 0 ? ShapeKind::kEllipse : ShapeKind::kRectangle;
        o.rx = rng.next_uniform(2.5, width / 8.0);
        o.ry = rng.next_uniform(2.5, height / 8.0);
        o.x = rng.next_uniform(o.rx, width - o.rx);
        o.y = rng.next_uniform(o.ry, height - o.ry);
        o.vx = rng.next_uniform(-1.5, 1.5);
        o.vy = rng.next_uniform(-1.5, 1.5);
        cfg.objects.push_back(o);
    }
    return cfg;
}

int ExactPropagator::identify_object(int frame, const BinaryMask& mask) const {
    int best = -1;
    double best_iou = 0.0;
    for (int oi = 0; oi < gt_->object_count(); ++oi) {
        const BinaryMask& candidate = gt_->mask(frame, oi);
        if (candidate.empty() && mask.empty()) continue;
        const double v = mask_iou(candidate, mask);
        if (v > best_iou) {
            best_iou = v;
            best = oi;
        }
    }
    return best;
}

BinaryMask ExactPropagator::propagate(int source_frame, const BinaryMask& source_mask,
                                      int target_frame) const {
    const int oi = identify_object(source_frame, source_mask);
    if (oi < 0) return BinaryMask(gt_->width(), gt_->height());
    return gt_->mask(target_frame, oi);
}

BinaryMask NoisyPropagator::propagate(int source_frame, const BinaryMask& source_mask,
                                      int target_frame) const {
    const int oi = identify_object(source_frame, source_mask);
    if (oi < 0) return BinaryMask(gt_->width(), gt_->height());

    Rng rng(Rng::derive(seed_, static_cast<std::uint64_t>(source_frame),
                        static_cast<std::uint64_t>(target_frame),
                        static_cast<std::uint64_t>(oi)));
    BinaryMask out(gt_->width(), gt_->height());
    if (rng.next_double() < dropout_) return out;  // propagation failure

    const double span = std::abs(target_frame - source_frame);
    const double sigma = jitter_ * std::sqrt(span);
    const int dx = static_cast<int>(std::lround(rng.next_gaussian() * sigma));
    const int dy = static_cast<int>(std::lround(rng.next_gaussian() * sigma));

    const BinaryMask& exact = gt_->mask(target_frame, oi);
    for (const PixelPoint& p : exact.pixels()) {
        const int nx = p.x + dx, ny = p.y + dy;
        if (nx >= 0 && ny >= 0 && nx < out.width() && ny < out.height()) out.set(nx, ny);
    }
    return out;
}

BinaryMask LabelSegmentOracle::segment(int frame, PixelPoint point) const {
    if (frame < 0 || frame >= static_cast<int>(frames_->size()))
        throw std::invalid_argument("segment: frame out of range");
    return flood_fill((*frames_)[frame], point);
}

}  // namespace vpoint
