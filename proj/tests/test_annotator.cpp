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

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <set>

#include "vpoint/annotator.hpp"
#include "vpoint/coords.hpp"
#include "vpoint/synth.hpp"

using namespace vpoint;

namespace {

BinaryMask full_mask(int w, int h) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y);
    return m;
}

BinaryMask disk_mask(int size, double radius) {
    BinaryMask m(size, size);
    const double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x + 0.5 - c, dy = y + 0.5 - c;
            if (dx * dx + dy * dy <= radius * radius) m.set(x, y);
        }
    return m;
}

// oracle returning a fixed mask for one specific prompt, empty otherwise
class SinglePointOracle : public SegmentOracle {
public:
    SinglePointOracle(PixelPoint hit, BinaryMask mask) : hit_(hit), mask_(std::move(mask)) {}
    BinaryMask segment(int, PixelPoint p) const override {
        if (p == hit_) return mask_;
        return BinaryMask(mask_.width(), mask_.height());
    }

private:
    PixelPoint hit_;
    BinaryMask mask_;
};

class ConstantOracle : public SegmentOracle {
public:
    explicit ConstantOracle(BinaryMask mask) : mask_(std::move(mask)) {}
    BinaryMask segment(int, PixelPoint) const override { return mask_; }

private:
    BinaryMask mask_;
};

}  // namespace

TEST_CASE("sample_candidates basics") {
    BinaryMask single(5, 5);
    single.set(2, 3);
    Rng rng(1);
    const CandidateSet cs = sample_candidates(single, 7, rng);
    CHECK(cs.points.size() == 7);
    for (const PixelPoint& p : cs.points) CHECK(p == PixelPoint{2, 3});

    // 3x3 all-ones: only the center has nonzero boundary distance
    const BinaryMask ones = full_mask(3, 3);
    Rng rng2(2);
    for (const PixelPoint& p : sample_candidates(ones, 50, rng2).points)
        CHECK(p == PixelPoint{1, 1});

    CHECK_THROWS_AS(sample_candidates(BinaryMask(3, 3), 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_candidates(ones, 0, rng), std::invalid_argument);
}

TEST_CASE("all-boundary masks fall back to uniform sampling") {
    // a 1-pixel-thin bar: every pixel is boundary, weights vanish
    BinaryMask bar(6, 3);
    for (int x = 0; x < 6; ++x) bar.set(x, 1);
    Rng rng(3);
    const CandidateSet cs = sample_candidates(bar, 2000, rng);
    std::map<int, int> hits;
    for (const PixelPoint& p : cs.points) {
        CHECK(bar.get(p.x, p.y));
        ++hits[p.x];
    }
    CHECK(hits.size() == 6);  // every pixel reachable under the fallback
}

TEST_CASE("sampled candidates always lie inside the mask") {
    const BinaryMask disk = disk_mask(16, 6.0);
    Rng rng(4);
    for (const PixelPoint& p : sample_candidates(disk, 500, rng).points)
        CHECK(disk.get(p.x, p.y));
}

TEST_CASE("sampling frequencies follow boundary-distance weights") {
    const BinaryMask disk = disk_mask(32, 14.0);
    const DistanceField field = distance_to_boundary(disk);
    Rng rng(5);
    const int draws = 100000;
    const CandidateSet cs = sample_candidates(disk, draws, rng);

    std::map<std::pair<int, int>, int> observed;
    for (const PixelPoint& p : cs.points) ++observed[{p.x, p.y}];

    double total_weight = 0.0;
    const std::vector<PixelPoint> pixels = disk.pixels();
    for (const PixelPoint& p : pixels) total_weight += field.at(p.x, p.y);

    // chi-square GOF over pixels with nonzero weight; small expected
    // counts pooled into one bin
    double chi2 = 0.0;
    int bins = 0;
    double pooled_expected = 0.0;
    int pooled_observed = 0;
    for (const PixelPoint& p : pixels) {
        const double w = field.at(p.x, p.y);
        if (w == 0.0) {
            CHECK(observed.count({p.x, p.y}) == 0);  // never drawn
            continue;
        }
        const double expected = draws * w / total_weight;
        const int got = observed.count({p.x, p.y}) ? observed[{p.x, p.y}] : 0;
        if (expected < 5.0) {
            pooled_expected += expected;
            pooled_observed += got;
            continue;
        }
        chi2 += (got - expected) * (got - expected) / expected;
        ++bins;
    }
    if (pooled_expected > 0.0) {
        chi2 += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) /
                pooled_expected;
        ++bins;
    }
    REQUIRE(bins > 1);
    const boost::math::chi_squared dist(bins - 1);
    const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
    CHECK(p_value > 0.01);
}

TEST_CASE("select_point picks the argmax and breaks ties low") {
    const BinaryMask gt = disk_mask(12, 4.0);
    CandidateSet cands;
    cands.points = {{1, 1}, {6, 6}, {2, 2}};
    cands.weights = {1.0, 1.0, 1.0};

    // only the middle candidate triggers the true mask
    const SinglePointOracle oracle({6, 6}, gt);
    CHECK(select_point(gt, cands, oracle, 0) == PixelPoint{6, 6});

    // all equal -> first candidate
    const ConstantOracle flat(gt);
    CHECK(select_point(gt, cands, flat, 0) == cands.points[0]);

    CHECK_THROWS_AS(select_point(gt, CandidateSet{}, flat, 0), std::invalid_argument);
}

TEST_CASE("select_point beats exhaustive re-scoring on a label oracle") {
    SceneConfig cfg;
    cfg.width = 24;
    cfg.height = 24;
    cfg.frame_count = 1;
    cfg.objects.push_back({ShapeKind::kEllipse, 8.0, 8.0, 0.0, 0.0, 5.0, 4.0});
    cfg.objects.push_back({ShapeKind::kRectangle, 18.0, 18.0, 0.0, 0.0, 3.0, 3.0});
    const SynthClip clip = gen_scene(cfg, 9);
    const LabelSegmentOracle oracle(clip.label_frames);

    const BinaryMask& gt = clip.gt.mask(0, 0);
    Rng rng(6);
    const CandidateSet cands = sample_candidates(gt, 8, rng);
    const PixelPoint chosen = select_point(gt, cands, oracle, 0);
    const double chosen_iou = mask_iou(oracle.segment(0, chosen), gt);
    for (const PixelPoint& p : cands.points)
        CHECK(chosen_iou >= mask_iou(oracle.segment(0, p), gt));
    CHECK(chosen_iou == 1.0);  // convex single-region object
}

TEST_CASE("annotate_clip determinism and membership") {
    SceneConfig cfg;
    cfg.width = 32;
    cfg.height = 24;
    cfg.frame_count = 10;
    cfg.objects.push_back({ShapeKind::kEllipse, 8.0, 10.0, 1.0, 0.2, 4.0, 4.0});
    cfg.objects.push_back({ShapeKind::kRectangle, 24.0, 12.0, -0.5, 0.0, 3.0, 4.0});
    const SynthClip clip = gen_scene(cfg, 11);
    const LabelSegmentOracle oracle(clip.label_frames);

    const AnnotationResult a = annotate_clip(clip.gt, 5, oracle, 77);
    const AnnotationResult b = annotate_clip(clip.gt, 5, oracle, 77);
    CHECK(a.failures.empty());
    REQUIRE(a.annotations.size() == b.annotations.size());
    for (std::size_t i = 0; i < a.annotations.size(); ++i) {
        CHECK(a.annotations[i].frame == b.annotations[i].frame);
        CHECK(a.annotations[i].x == b.annotations[i].x);
        CHECK(a.annotations[i].y == b.annotations[i].y);
    }

    // every annotated point lies inside its gt mask; all frames covered
    std::set<int> frames_seen;
    for (const PointAnnotation& ann : a.annotations) {
        frames_seen.insert(ann.frame);
        int oi = -1;
        for (int i = 0; i < clip.gt.object_count(); ++i)
            if (clip.gt.object_ids()[i] == ann.object) oi = i;
        REQUIRE(oi >= 0);
        const PixelPoint p = percent_to_pixel_point(ann.x, ann.y, cfg.width, cfg.height);
        CHECK(clip.gt.mask(ann.frame, oi).get(p.x, p.y));
    }
    CHECK(frames_seen.size() == 10);
}

TEST_CASE("single-pixel objects annotate at exactly those pixels") {
    MaskClip gt(8, 8, 2, {1});
    gt.mask(0, 0).set(3, 4);
    gt.mask(1, 0).set(5, 2);
    // render label frames for the oracle
    std::vector<LabelImage> frames;
    for (int f = 0; f < 2; ++f) frames.push_back(gt.render_frame(f));
    const LabelSegmentOracle oracle(frames);

    const AnnotationResult r = annotate_clip(gt, 3, oracle, 1);
    REQUIRE(r.annotations.size() == 2);
    CHECK(percent_to_pixel_point(r.annotations[0].x, r.annotations[0].y, 8, 8) == PixelPoint{3, 4});
    CHECK(percent_to_pixel_point(r.annotations[1].x, r.annotations[1].y, 8, 8) == PixelPoint{5, 2});
}

TEST_CASE("pixel/percent round trip") {
    for (int extent : {1, 3, 7, 640}) {
        for (int i = 0; i < extent; ++i)
            CHECK(percent_to_pixel(pixel_to_percent(i, extent), extent) == i);
    }
}

TEST_CASE("annotation file round trip") {
    const std::vector<PointAnnotation> anns = {{0, 1, 12.34, 56.78}, {3, 2, 99.99, 0.01}};
    const std::string path = "test_annotations.csv";
    write_annotations(anns, "clipA", path);
    std::string video;
    const std::vector<PointAnnotation> back = read_annotations(path, &video);
    CHECK(video == "clipA");
    REQUIRE(back.size() == 2);
    CHECK(back[0].frame == 0);
    CHECK(back[0].object == 1);
    CHECK(back[0].x == 12.34);
    CHECK(back[1].y == 0.01);
    std::remove(path.c_str());
}
