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

#include "vpoint/mask.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace vpoint {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("mask dimension mismatch: " +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()));
}

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("mask dimensions must be >= 1");
    const std::size_t bits = static_cast<std::size_t>(width) * height;
    words_.assign((bits + 63) / 64, 0);
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<PixelPoint> BinaryMask::pixels() const {
    std::vector<PixelPoint> out;
    out.reserve(count());
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (get(x, y)) out.push_back({x, y});
    return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    const std::size_t inter = mask_intersect(a, b).count();
    const std::size_t uni = mask_union(a, b).count();
    if (uni == 0) return 1.0;  // both empty: agree on absence
    return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out = a;
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] &= b.words_[i];
    return out;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out = a;
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] |= b.words_[i];
    return out;
}

std::vector<PixelPoint> mask_boundary(const BinaryMask& m) {
    std::vector<PixelPoint> out;
    const int w = m.width(), h = m.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.get(x, y)) continue;
            bool border = false;
            for (int dy = -1; dy <= 1 && !border; ++dy) {
                for (int dx = -1; dx <= 1 && !border; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    // image border counts as background
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m.get(nx, ny))
                        border = true;
                }
            }
            if (border) out.push_back({x, y});
        }
    }
    return out;
}

namespace {

// Larger than any attainable squared distance, small enough that
// envelope arithmetic stays exact in int64/double.
constexpr std::int64_t kFar = std::int64_t{1} << 52;

// 1D squared-distance lower envelope (Felzenszwalb-Huttenlocher).
// Input g: squared source cost per cell (kFar = no source); output
// d[i] = min_j (i-j)^2 + g[j].
void envelope_1d(const std::vector<std::int64_t>& g, std::vector<std::int64_t>& d,
                 std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(g.size());
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[k];
            s = (static_cast<double>(g[q] - g[p]) + static_cast<double>(q) * q -
                 static_cast<double>(p) * p) /
                (2.0 * (q - p));
            if (s > z[k]) break;
            if (--k < 0) break;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -std::numeric_limits<double>::infinity() : s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const std::int64_t dq = q - v[j];
        d[q] = dq * dq + g[v[j]];
    }
}

}  // namespace

std::vector<std::int64_t> squared_distance_transform(const BinaryMask& seeds) {
    const int w = seeds.width(), h = seeds.height();
    std::vector<std::int64_t> field(static_cast<std::size_t>(w) * h);

    // pass 1: per column, distance to nearest seed within the column
    for (int x = 0; x < w; ++x) {
        std::int64_t since = kFar;
        for (int y = 0; y < h; ++y) {
            since = seeds.get(x, y) ? 0 : (since >= h ? kFar : since + 1);
            field[static_cast<std::size_t>(y) * w + x] = since;
        }
        since = kFar;
        for (int y = h - 1; y >= 0; --y) {
            since = seeds.get(x, y) ? 0 : (since >= h ? kFar : since + 1);
            std::int64_t& cell = field[static_cast<std::size_t>(y) * w + x];
            cell = std::min(cell, since);
            cell = cell >= kFar ? kFar : cell * cell;
        }
    }

    // pass 2: per row, lower envelope over squared column distances
    std::vector<std::int64_t> g(w), d(w);
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) g[x] = field[static_cast<std::size_t>(y) * w + x];
        envelope_1d(g, d, v, z);
        for (int x = 0; x < w; ++x) field[static_cast<std::size_t>(y) * w + x] = d[x];
    }
    return field;
}

DistanceField distance_to_boundary(const BinaryMask& m) {
    if (m.empty()) throw std::invalid_argument("distance_to_boundary: empty mask");
    const int w = m.width(), h = m.height();
    BinaryMask seeds(w, h);
    for (const PixelPoint& p : mask_boundary(m)) seeds.set(p.x, p.y);
    const std::vector<std::int64_t> sq = squared_distance_transform(seeds);

    DistanceField out;
    out.width = w;
    out.height = h;
    out.values.assign(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (m.get(x, y)) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                out.values[i] = std::sqrt(static_cast<double>(sq[i]));
            }
    return out;
}

BinaryMask flood_fill(const LabelImage& labels, PixelPoint seed) {
    if (seed.x < 0 || seed.y < 0 || seed.x >= labels.width || seed.y >= labels.height)
        throw std::invalid_argument("flood_fill: seed out of bounds");
    BinaryMask out(labels.width, labels.height);
    const std::uint8_t target = labels.at(seed.x, seed.y);
    if (target == 0) return out;  // background seed -> empty

    std::deque<PixelPoint> queue{seed};
    out.set(seed.x, seed.y);
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const PixelPoint p = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int nx = p.x + dx[k], ny = p.y + dy[k];
            if (nx < 0 || ny < 0 || nx >= labels.width || ny >= labels.height) continue;
            if (out.get(nx, ny) || labels.at(nx, ny) != target) continue;
            out.set(nx, ny);
            queue.push_back({nx, ny});
        }
    }
    return out;
}

std::vector<std::uint32_t> rle_runs(const BinaryMask& m) {
    std::vector<std::uint32_t> runs;
    bool current = false;  // background-first
    std::uint32_t len = 0;
    const std::size_t total = static_cast<std::size_t>(m.width()) * m.height();
    for (std::size_t i = 0; i < total; ++i) {
        const bool bit = m.get(static_cast<int>(i % m.width()), static_cast<int>(i / m.width()));
        if (bit == current) {
            ++len;
        } else {
            runs.push_back(len);
            current = bit;
            len = 1;
        }
    }
    runs.push_back(len);
    return runs;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw std::runtime_error("RLE: truncated container");
    const std::uint32_t v = static_cast<std::uint32_t>(in[pos]) |
                            static_cast<std::uint32_t>(in[pos + 1]) << 8 |
                            static_cast<std::uint32_t>(in[pos + 2]) << 16 |
                            static_cast<std::uint32_t>(in[pos + 3]) << 24;
    pos += 4;
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_rle(const BinaryMask& m) {
    std::vector<std::uint8_t> out{'M', 'S', 'E', 'Q', 0x01};
    put_u32(out, static_cast<std::uint32_t>(m.width()));
    put_u32(out, static_cast<std::uint32_t>(m.height()));
    const std::vector<std::uint32_t> runs = rle_runs(m);
    put_u32(out, static_cast<std::uint32_t>(runs.size()));
    for (std::uint32_t r : runs) put_u32(out, r);
    return out;
}

BinaryMask decode_rle(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 5 || std::memcmp(bytes.data(), "MSEQ", 4) != 0)
        throw std::runtime_error("RLE: bad magic");
    if (bytes[4] != 0x01) throw std::runtime_error("RLE: unsupported version");
    std::size_t pos = 5;
    const std::uint32_t w = get_u32(bytes, pos);
    const std::uint32_t h = get_u32(bytes, pos);
    const std::uint32_t run_count = get_u32(bytes, pos);
    if (w < 1 || h < 1) throw std::runtime_error("RLE: bad dimensions");

    BinaryMask out(static_cast<int>(w), static_cast<int>(h));
    std::uint64_t cursor = 0;
    bool current = false;
    const std::uint64_t total = static_cast<std::uint64_t>(w) * h;
    for (std::uint32_t i = 0; i < run_count; ++i) {
        const std::uint32_t len = get_u32(bytes, pos);
        if (cursor + len > total) throw std::runtime_error("RLE: run total exceeds pixel count");
        if (current)
            for (std::uint64_t j = cursor; j < cursor + len; ++j)
                out.set(static_cast<int>(j % w), static_cast<int>(j / w));
        cursor += len;
        current = !current;
    }
    if (cursor != total) throw std::runtime_error("RLE: run total mismatch");
    return out;
}

void write_label_pgm(const LabelImage& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.labels.data()),
            static_cast<std::streamsize>(img.labels.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

LabelImage read_label_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    f >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 255 || w < 1 || h < 1)
        throw std::runtime_error("not a supported P5 PGM: " + path);
    f.get();  // single whitespace after header
    LabelImage img(w, h);
    f.read(reinterpret_cast<char*>(img.labels.data()),
           static_cast<std::streamsize>(img.labels.size()));
    if (!f) throw std::runtime_error("truncated PGM: " + path);
    return img;
}

}  // namespace vpoint
