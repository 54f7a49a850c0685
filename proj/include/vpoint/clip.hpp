// Per-frame, per-object mask sequences for a video, with disk I/O.
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

#include "vpoint/mask.hpp"

namespace vpoint {

/// One binary mask per (frame, object). Object ids are the roster order;
/// absent objects hold empty masks.
class MaskClip {
public:
    MaskClip() = default;
    MaskClip(int width, int height, int frame_count, std::vector<int> object_ids);

    int width() const { return width_; }
    int height() const { return height_; }
    int frame_count() const { return frame_count_; }
    const std::vector<int>& object_ids() const { return object_ids_; }
    int object_count() const { return static_cast<int>(object_ids_.size()); }

    const BinaryMask& mask(int frame, int object_index) const;
    BinaryMask& mask(int frame, int object_index);

    /// Frames rendered as label images (pixel = object id). Objects later
    /// in the roster overwrite earlier ones where masks overlap.
    LabelImage render_frame(int frame) const;

    bool operator==(const MaskClip&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int frame_count_ = 0;
    std::vector<int> object_ids_;
    std::vector<BinaryMask> masks_;  // frame-major
};

/// Writes one P5 PGM per frame (frame_00000.pgm, ...) plus clip.json
/// {width, height, frames, objects}. Extra manifest fields are preserved
/// by readers.
void write_clip(const MaskClip& clip, const std::string& dir);
MaskClip read_clip(const std::string& dir);

/// Raw label frames of a clip directory, in frame order.
std::vector<LabelImage> read_clip_frames(const std::string& dir);

/// Builds a clip from label frames using the given roster (or the sorted
/// set of nonzero labels present when roster is empty).
MaskClip clip_from_labels(const std::vector<LabelImage>& frames,
                          std::vector<int> object_ids = {});

}  // namespace vpoint
