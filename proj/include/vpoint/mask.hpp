// Binary mask representation and algebra: IoU, set ops, boundary
// extraction, exact Euclidean distance transform, flood fill, RLE.
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

namespace vpoint {

struct PixelPoint {
    int x = 0;  // column, 0-based
    int y = 0;  // row, 0-based

    bool operator==(const PixelPoint&) const = default;
};

/// Row-major occupancy bitmap, one bit per pixel.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool get(int x, int y) const {
        const std::size_t i = index(x, y);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(int x, int y, bool value = true) {
        const std::size_t i = index(x, y);
        const std::uint64_t bit = 1ULL << (i & 63);
        if (value)
            words_[i >> 6] |= bit;
        else
            words_[i >> 6] &= ~bit;
    }

    /// Number of set pixels.
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    bool same_shape(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    std::vector<PixelPoint> pixels() const;

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    friend BinaryMask mask_intersect(const BinaryMask&, const BinaryMask&);
    friend BinaryMask mask_union(const BinaryMask&, const BinaryMask&);

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Per-pixel Euclidean distance to the nearest mask-boundary pixel.
/// Zero on boundary pixels and outside the mask.
struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

/// Label image: pixel value = object id, 0 = background.
struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;  // row-major

    LabelImage() = default;
    LabelImage(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t v) {
        labels[static_cast<std::size_t>(y) * width + x] = v;
    }
};

/// |a ∩ b| / |a ∪ b|. Two empty masks score 1.0 (both agree the object
/// is absent). Throws std::invalid_argument on dimension mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);

/// Mask pixels with at least one background pixel in their 8-neighborhood;
/// the image border counts as background.
std::vector<PixelPoint> mask_boundary(const BinaryMask& m);

/// Exact squared Euclidean distance from every pixel to the nearest seed
/// pixel (two-pass lower-envelope transform). Seeds given as a bitmap.
/// Pixels are treated as lattice points; results are exact integers.
std::vector<std::int64_t> squared_distance_transform(const BinaryMask& seeds);

/// Exact Euclidean distance from each mask pixel to its nearest boundary
/// pixel; 0 outside the mask. Throws on an empty mask.
DistanceField distance_to_boundary(const BinaryMask& m);

/// 4-connected region of the seed's label. Label 0 yields an empty mask.
BinaryMask flood_fill(const LabelImage& labels, PixelPoint seed);

/// RLE container: magic "MSEQ", version 0x01, little-endian u32 width,
/// height, run count, then u32 runs alternating background-first in
/// row-major order.
std::vector<std::uint8_t> encode_rle(const BinaryMask& m);
BinaryMask decode_rle(const std::vector<std::uint8_t>& bytes);

/// Bare run lengths (background-first), without the container framing.
std::vector<std::uint32_t> rle_runs(const BinaryMask& m);

/// Binary PGM (P5, maxval 255) with pixel value = object id.
void write_label_pgm(const LabelImage& img, const std::string& path);
LabelImage read_label_pgm(const std::string& path);

}  // namespace vpoint
