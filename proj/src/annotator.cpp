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

#include "vpoint/annotator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vpoint/coords.hpp"

namespace vpoint {

CandidateSet sample_candidates(const BinaryMask& m, int k, Rng& rng) {
    if (m.empty()) throw std::invalid_argument("sample_candidates: empty mask");
    if (k < 1) throw std::invalid_argument("sample_candidates: k must be >= 1");

    const std::vector<PixelPoint> pixels = m.pixels();
    const DistanceField field = distance_to_boundary(m);
    std::vector<double> weights(pixels.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        weights[i] = field.at(pixels[i].x, pixels[i].y);
        total += weights[i];
    }
    if (total == 0.0) {
        // every mask pixel is a boundary pixel; fall back to uniform
        std::fill(weights.begin(), weights.end(), 1.0);
        total = static_cast<double>(pixels.size());
    }

    std::vector<double> cumulative(weights.size());
    double running = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        running += weights[i];
        cumulative[i] = running;
    }

    CandidateSet out;
    out.points.reserve(k);
    out.weights.reserve(k);
    for (int i = 0; i < k; ++i) {
        const double u = rng.next_double() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx =
            std::min(static_cast<std::size_t>(it - cumulative.begin()), pixels.size() - 1);
        out.points.push_back(pixels[idx]);
        out.weights.push_back(weights[idx]);
    }
    return out;
}

PixelPoint select_point(const BinaryMask& m_gt, const CandidateSet& cands,
                        const SegmentOracle& oracle, int frame) {
    if (cands.points.empty()) throw std::invalid_argument("select_point: no candidates");
    std::size_t best = 0;
    double best_iou = -1.0;
    for (std::size_t i = 0; i < cands.points.size(); ++i) {
        const double score = mask_iou(oracle.segment(frame, cands.points[i]), m_gt);
        if (score > best_iou) {  // strict: ties keep the earlier candidate
            best_iou = score;
            best = i;
        }
    }
    return cands.points[best];
}

AnnotationResult annotate_clip(const MaskClip& gt, int candidate_count,
                               const SegmentOracle& oracle, std::uint64_t seed) {
    if (candidate_count < 1) throw std::invalid_argument("annotate_clip: candidate_count >= 1");
    AnnotationResult result;
    for (int f = 0; f < gt.frame_count(); ++f) {
        for (int oi = 0; oi < gt.object_count(); ++oi) {
            const BinaryMask& m = gt.mask(f, oi);
            if (m.empty()) continue;
            const int object_id = gt.object_ids()[oi];
            try {
                Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(f),
                                    static_cast<std::uint64_t>(object_id)));
                const CandidateSet cands = sample_candidates(m, candidate_count, rng);
                const PixelPoint p = select_point(m, cands, oracle, f);
                result.annotations.push_back({f, object_id,
                                              pixel_to_percent(p.x, gt.width()),
                                              pixel_to_percent(p.y, gt.height())});
            } catch (const std::exception& e) {
                result.failures.push_back({f, object_id, e.what()});
            }
        }
    }
    return result;
}

void write_annotations(const std::vector<PointAnnotation>& annotations,
                       const std::string& video, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "video,frame,object,x,y\n";
    char buf[64];
    for (const PointAnnotation& a : annotations) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f", a.x, a.y);
        out << video << "," << a.frame << "," << a.object << "," << buf << "\n";
    }
}

std::vector<PointAnnotation> read_annotations(const std::string& path, std::string* video) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "video,frame,object,x,y")
        throw std::runtime_error("bad annotation header in " + path);
    std::vector<PointAnnotation> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        PointAnnotation a;
        std::getline(ss, field, ',');
        if (video) *video = field;
        std::getline(ss, field, ',');
        a.frame = std::stoi(field);
        std::getline(ss, field, ',');
        a.object = std::stoi(field);
        std::getline(ss, field, ',');
        a.x = std::stod(field);
        std::getline(ss, field, ',');
        a.y = std::stod(field);
        out.push_back(a);
    }
    return out;
}

}  // namespace vpoint
