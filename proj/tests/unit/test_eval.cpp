#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "textdct/eval.hpp"
#include "textdct/synthetic.hpp"

using namespace textdct;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ScoredRegion region(const Polygon& p, double score) { return {{p}, score}; }

}  // namespace

TEST(Match, SingleDetectionAtTwoThresholds) {
  // Overlap 60 of union 100 -> IOU 0.6.
  const std::vector<TextInstance> gt{{rect(0, 0, 80, 1), false}};
  const std::vector<ScoredRegion> d{region(rect(20, 0, 100, 1), 0.9)};
  const auto lo = match_and_score(d, gt, 0.5);
  EXPECT_DOUBLE_EQ(lo.precision, 1.0);
  EXPECT_DOUBLE_EQ(lo.recall, 1.0);
  EXPECT_DOUBLE_EQ(lo.f_measure, 1.0);
  const auto hi = match_and_score(d, gt, 0.7);
  EXPECT_DOUBLE_EQ(hi.precision, 0.0);
  EXPECT_DOUBLE_EQ(hi.recall, 0.0);
  EXPECT_DOUBLE_EQ(hi.f_measure, 0.0);
}

TEST(Match, DuplicateDetection) {
  const std::vector<TextInstance> gt{{rect(0, 0, 10, 10), false}};
  const std::vector<ScoredRegion> d{region(rect(0, 0, 10, 10), 0.7),
                                    region(rect(0, 0, 10, 9), 0.9)};
  const auto s = match_and_score(d, gt, 0.5);
  EXPECT_EQ(s.counts.tp, 1);
  EXPECT_EQ(s.counts.fp, 1);
  EXPECT_DOUBLE_EQ(s.precision, 0.5);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  EXPECT_NEAR(s.f_measure, 2.0 / 3.0, 1e-12);
}

TEST(Match, IgnoreRegionsExcluded) {
  const std::vector<TextInstance> gt{{rect(0, 0, 10, 10), false},
                                     {rect(50, 50, 60, 60), true}};
  const std::vector<ScoredRegion> d{region(rect(0, 0, 10, 10), 0.9),
                                    region(rect(50, 50, 60, 60), 0.8)};
  const auto s = match_and_score(d, gt, 0.5);
  EXPECT_EQ(s.counts.tp, 1);
  EXPECT_EQ(s.counts.fp, 0);
  EXPECT_EQ(s.counts.fn, 0);
  EXPECT_EQ(s.counts.ignored, 1);
  EXPECT_DOUBLE_EQ(s.f_measure, 1.0);
}

TEST(Match, EmptyConventions) {
  EXPECT_DOUBLE_EQ(match_and_score({}, {}, 0.5).precision, 1.0);
  EXPECT_DOUBLE_EQ(match_and_score({}, {}, 0.5).f_measure, 1.0);
  const auto fp_only = match_and_score({region(rect(0, 0, 5, 5), 1)}, {}, 0.5);
  EXPECT_DOUBLE_EQ(fp_only.precision, 0.0);
  const auto fn_only = match_and_score({}, {{rect(0, 0, 5, 5), false}}, 0.5);
  EXPECT_DOUBLE_EQ(fn_only.recall, 0.0);
  EXPECT_DOUBLE_EQ(fn_only.precision, 0.0);
}

TEST(Match, InvariantsOverRandomScenes) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> pos(0, 200), size(8, 60), jitter(-6, 6);
  for (int t = 0; t < 40; ++t) {
    std::vector<TextInstance> gt;
    for (int i = 0; i < 5; ++i) {
      const double x = pos(rng), y = pos(rng);
      gt.push_back({rect(x, y, x + size(rng), y + size(rng)), i == 4});
    }
    std::vector<ScoredRegion> d;
    for (const auto& g : gt) {
      const Box b = bounding_box(g.polygon);
      d.push_back(region(rect(b.x_min + jitter(rng), b.y_min + jitter(rng),
                              b.x_max + jitter(rng), b.y_max + jitter(rng)),
                         std::uniform_real_distribution<double>(0, 1)(rng)));
    }
    d.push_back(region(rect(300, 300, 320, 320), 0.5));
    double prev_f = 2.0;
    for (double thr : default_iou_thresholds()) {
      const auto s = match_and_score(d, gt, thr);
      EXPECT_EQ(s.counts.tp + s.counts.fn, 4);
      EXPECT_EQ(s.counts.tp + s.counts.fp + s.counts.ignored, static_cast<int>(d.size()));
      EXPECT_GE(s.precision, 0.0);
      EXPECT_LE(s.precision, 1.0);
      EXPECT_LE(s.f_measure, prev_f + 1e-12);
      prev_f = s.f_measure;
      auto shuffled = d;
      std::reverse(shuffled.begin(), shuffled.end());
      const auto s2 = match_and_score(shuffled, gt, thr);
      EXPECT_EQ(s2.counts.tp, s.counts.tp);
      EXPECT_EQ(s2.counts.fp, s.counts.fp);
    }
  }
}

TEST(Corpus, SumsCountsAcrossImages) {
  const std::vector<CorpusRecord> gts{
      {"a", 100, 100, {{rect(0, 0, 10, 10), false}}, {}},
      {"b", 100, 100, {{rect(0, 0, 10, 10), false}, {rect(40, 40, 50, 50), false}}, {}}};
  const std::vector<ImageDetections> dets{{"b", {region(rect(0, 0, 10, 10), 0.9)}},
                                          {"zz", {region(rect(0, 0, 10, 10), 0.9)}}};
  const auto rep = evaluate_corpus(dets, gts, default_iou_thresholds(), 2);
  const auto& s = rep.at(0.5);
  EXPECT_EQ(s.counts.tp, 1);
  EXPECT_EQ(s.counts.fn, 2);
  EXPECT_EQ(s.counts.fp, 0);
  EXPECT_EQ(rep.images, 2);
  EXPECT_THROW(rep.at(0.55), std::out_of_range);
}

TEST(Challenging, Rules) {
  EXPECT_FALSE(is_challenging(rect(10, 10, 110, 40), 1000, 800));
  EXPECT_TRUE(is_challenging(rect(10, 10, 800, 40), 1000, 800));
  // Right triangle covers half its box; a thinner wedge less than that.
  const Polygon wedge({{0, 0}, {100, 0}, {100, 20}, {0, 100}, {0, 80}, {80, 10}});
  const Box b = bounding_box(wedge);
  ASSERT_LT(wedge.area() / b.area(), 0.5);
  EXPECT_TRUE(is_challenging(wedge, 1000, 1000));
}

TEST(Challenging, SyntheticCurvatureClasses) {
  SyntheticShapeSpec straight;
  straight.length = 300;
  const Polygon band = synthesize_shape(straight);
  EXPECT_GT(band.area() / bounding_box(band).area(), 0.5);
  EXPECT_FALSE(is_challenging(band, 1280, 1280));

  SyntheticShapeSpec crescent;
  crescent.kind = CurveKind::kArc;
  crescent.arc_angle = 4.5;
  crescent.length = 400;
  crescent.half_width = 14;
  const Polygon c = synthesize_shape(crescent);
  EXPECT_LT(c.area() / bounding_box(c).area(), 0.5);
  EXPECT_TRUE(is_challenging(c, 1280, 1280));
}

TEST(Challenging, SubsetKeepsImagesWithAnyHit) {
  const std::vector<CorpusRecord> corpus{
      {"plain", 1000, 1000, {{rect(0, 0, 100, 30), false}}, {}},
      {"long", 1000, 1000, {{rect(0, 0, 100, 30), false}, {rect(0, 100, 900, 130), false}}, {}},
      {"ignored", 1000, 1000, {{rect(0, 100, 900, 130), true}}, {}}};
  const auto sub = challenging_subset(corpus);
  ASSERT_EQ(sub.size(), 1u);
  EXPECT_EQ(sub[0].image_id, "long");
}
