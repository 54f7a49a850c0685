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

#include "vpoint/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "vpoint/coords.hpp"

namespace vpoint {

namespace {

void require_compatible(const MaskClip& pred, const MaskClip& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw std::invalid_argument("clip dimension mismatch");
    if (pred.frame_count() != gt.frame_count())
        throw std::invalid_argument("clip frame count mismatch");
    if (pred.object_ids() != gt.object_ids())
        throw std::invalid_argument("clip object roster mismatch");
}

// Fraction of `from`-boundary pixels whose nearest `to`-boundary pixel
// lies within tol (Euclidean). Squared-integer comparison, so exact.
double boundary_match_fraction(const std::vector<PixelPoint>& from, const BinaryMask& to_mask,
                               const std::vector<PixelPoint>& to, double tol) {
    if (from.empty()) return 0.0;
    BinaryMask seeds(to_mask.width(), to_mask.height());
    for (const PixelPoint& p : to) seeds.set(p.x, p.y);
    const std::vector<std::int64_t> sq = squared_distance_transform(seeds);
    const double tol_sq = tol * tol;
    std::size_t matched = 0;
    for (const PixelPoint& p : from) {
        const std::int64_t d = sq[static_cast<std::size_t>(p.y) * to_mask.width() + p.x];
        if (static_cast<double>(d) <= tol_sq) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(from.size());
}

}  // namespace

double boundary_tolerance(int width, int height) {
    const double diag = std::sqrt(static_cast<double>(width) * width +
                                  static_cast<double>(height) * height);
    return std::max(1.0, std::round(0.008 * diag));
}

double region_jaccard(const MaskClip& pred, const MaskClip& gt) {
    require_compatible(pred, gt);
    double object_sum = 0.0;
    for (int oi = 0; oi < gt.object_count(); ++oi) {
        double frame_sum = 0.0;
        for (int f = 0; f < gt.frame_count(); ++f)
            frame_sum += mask_iou(pred.mask(f, oi), gt.mask(f, oi));
        object_sum += frame_sum / gt.frame_count();
    }
    return object_sum / gt.object_count();
}

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double tol) {
    if (!pred.same_shape(gt)) throw std::invalid_argument("boundary_f: dimension mismatch");
    if (tol < 0) throw std::invalid_argument("boundary_f: negative tolerance");
    const std::vector<PixelPoint> pb = mask_boundary(pred);
    const std::vector<PixelPoint> gb = mask_boundary(gt);
    if (pb.empty() && gb.empty()) return 1.0;
    if (pb.empty() || gb.empty()) return 0.0;
    const double precision = boundary_match_fraction(pb, gt, gb, tol);
    const double recall = boundary_match_fraction(gb, pred, pb, tol);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

SegScore jf(const MaskClip& pred, const MaskClip& gt) {
    require_compatible(pred, gt);
    const double tol = boundary_tolerance(gt.width(), gt.height());
    double j_sum = 0.0, f_sum = 0.0;
    for (int oi = 0; oi < gt.object_count(); ++oi) {
        double j_frames = 0.0, f_frames = 0.0;
        for (int f = 0; f < gt.frame_count(); ++f) {
            j_frames += mask_iou(pred.mask(f, oi), gt.mask(f, oi));
            f_frames += boundary_f(pred.mask(f, oi), gt.mask(f, oi), tol);
        }
        j_sum += j_frames / gt.frame_count();
        f_sum += f_frames / gt.frame_count();
    }
    SegScore score;
    score.j = j_sum / gt.object_count();
    score.f = f_sum / gt.object_count();
    score.jf = (score.j + score.f) / 2.0;
    return score;
}

PointScore point_prf(const std::vector<FramePoint>& pred_points, const MaskClip& gt) {
    PointScore score;
    for (const FramePoint& p : pred_points)
        if (p.frame < 0 || p.frame >= gt.frame_count())
            throw std::invalid_argument("point_prf: frame index out of range");

    for (int f = 0; f < gt.frame_count(); ++f)
        for (int oi = 0; oi < gt.object_count(); ++oi)
            if (!gt.mask(f, oi).empty()) ++score.actual;

    // greedy one-to-one per frame in prediction order
    std::vector<std::vector<bool>> taken(gt.frame_count(),
                                         std::vector<bool>(gt.object_count(), false));
    for (const FramePoint& p : pred_points) {
        ++score.predicted;
        const PixelPoint px = percent_to_pixel_point(p.x, p.y, gt.width(), gt.height());
        for (int oi = 0; oi < gt.object_count(); ++oi) {
            if (taken[p.frame][oi]) continue;
            if (gt.mask(p.frame, oi).get(px.x, px.y)) {
                taken[p.frame][oi] = true;
                ++score.matched;
                break;
            }
        }
    }

    score.precision = score.predicted ? static_cast<double>(score.matched) / score.predicted : 0.0;
    score.recall = score.actual ? static_cast<double>(score.matched) / score.actual : 0.0;
    const double pr = score.precision + score.recall;
    score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
    return score;
}

CountScore counting(const std::vector<int>& preds, const std::vector<int>& gts) {
    if (preds.size() != gts.size()) throw std::invalid_argument("counting: length mismatch");
    if (preds.empty()) throw std::invalid_argument("counting: empty input");
    double abs_sum = 0.0;
    std::size_t exact = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        abs_sum += std::abs(preds[i] - gts[i]);
        if (preds[i] == gts[i]) ++exact;
    }
    CountScore score;
    score.mae = abs_sum / static_cast<double>(preds.size());
    score.ema = 100.0 * static_cast<double>(exact) / static_cast<double>(preds.size());
    return score;
}

}  // namespace vpoint
