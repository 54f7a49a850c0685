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

#include "vpoint/clip.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace vpoint {

namespace {

std::string frame_filename(int frame) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05d.pgm", frame);
    return buf;
}

}  // namespace

MaskClip::MaskClip(int width, int height, int frame_count, std::vector<int> object_ids)
    : width_(width), height_(height), frame_count_(frame_count), object_ids_(std::move(object_ids)) {
    if (width < 1 || height < 1 || frame_count < 1)
        throw std::invalid_argument("MaskClip: dimensions and frame count must be >= 1");
    masks_.assign(static_cast<std::size_t>(frame_count_) * object_ids_.size(),
                  BinaryMask(width_, height_));
}

const BinaryMask& MaskClip::mask(int frame, int object_index) const {
    return masks_[static_cast<std::size_t>(frame) * object_ids_.size() + object_index];
}

BinaryMask& MaskClip::mask(int frame, int object_index) {
    return masks_[static_cast<std::size_t>(frame) * object_ids_.size() + object_index];
}

LabelImage MaskClip::render_frame(int frame) const {
    LabelImage img(width_, height_);
    for (std::size_t oi = 0; oi < object_ids_.size(); ++oi) {
        const BinaryMask& m = mask(frame, static_cast<int>(oi));
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x)
                if (m.get(x, y)) img.set(x, y, static_cast<std::uint8_t>(object_ids_[oi]));
    }
    return img;
}

void write_clip(const MaskClip& clip, const std::string& dir) {
    fs::create_directories(dir);
    for (int f = 0; f < clip.frame_count(); ++f)
        write_label_pgm(clip.render_frame(f), (fs::path(dir) / frame_filename(f)).string());

    nlohmann::json meta;
    meta["width"] = clip.width();
    meta["height"] = clip.height();
    meta["frames"] = clip.frame_count();
    meta["objects"] = clip.object_ids();
    std::ofstream out(fs::path(dir) / "clip.json");
    out << meta.dump(2) << "\n";
}

MaskClip read_clip(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "clip.json");
    if (!in) throw std::runtime_error("not a clip directory (no clip.json): " + dir);
    nlohmann::json meta = nlohmann::json::parse(in);
    std::vector<int> ids = meta.at("objects").get<std::vector<int>>();
    return clip_from_labels(read_clip_frames(dir), std::move(ids));
}

std::vector<LabelImage> read_clip_frames(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "clip.json");
    if (!in) throw std::runtime_error("not a clip directory (no clip.json): " + dir);
    nlohmann::json meta = nlohmann::json::parse(in);
    const int frames = meta.at("frames").get<int>();
    std::vector<LabelImage> label_frames;
    label_frames.reserve(frames);
    for (int f = 0; f < frames; ++f)
        label_frames.push_back(read_label_pgm((fs::path(dir) / frame_filename(f)).string()));
    return label_frames;
}

MaskClip clip_from_labels(const std::vector<LabelImage>& frames, std::vector<int> object_ids) {
    if (frames.empty()) throw std::invalid_argument("clip_from_labels: no frames");
    const int w = frames[0].width, h = frames[0].height;
    for (const LabelImage& f : frames)
        if (f.width != w || f.height != h)
            throw std::invalid_argument("clip_from_labels: inconsistent frame dimensions");

    if (object_ids.empty()) {
        std::set<int> seen;
        for (const LabelImage& f : frames)
            for (std::uint8_t v : f.labels)
                if (v != 0) seen.insert(v);
        object_ids.assign(seen.begin(), seen.end());
    }

    MaskClip clip(w, h, static_cast<int>(frames.size()), object_ids);
    for (int f = 0; f < clip.frame_count(); ++f)
        for (int oi = 0; oi < clip.object_count(); ++oi) {
            const int id = clip.object_ids()[oi];
            BinaryMask& m = clip.mask(f, oi);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (frames[f].at(x, y) == id) m.set(x, y);
        }
    return clip;
}

}  // namespace vpoint
