#include "textdct/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "textdct/parallel.hpp"

namespace textdct {

namespace {

bool boxes_overlap(const Box& a, const Box& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max &&
         b.y_min < a.y_max;
}

}  // namespace

const ThresholdScore& EvalReport::at(double iou_threshold) const {
  for (const auto& t : thresholds) {
    if (std::abs(t.iou_threshold - iou_threshold) < 1e-12) return t;
  }
  throw std::out_of_range("EvalReport: threshold not evaluated");
}

std::vector<std::vector<double>> iou_matrix(
    const std::vector<ScoredRegion>& dets,
    const std::vector<TextInstance>& gts) {
  std::vector<std::vector<double>> out(dets.size(),
                                       std::vector<double>(gts.size(), 0.0));
  std::vector<Box> gt_boxes;
  gt_boxes.reserve(gts.size());
  for (const auto& g : gts) gt_boxes.push_back(bounding_box(g.polygon));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].contours.empty()) continue;
    const Box db = bounding_box(std::span<const Polygon>(dets[i].contours));
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (!boxes_overlap(db, gt_boxes[j])) continue;
      out[i][j] = region_iou(dets[i].contours,
                             std::span<const Polygon>(&gts[j].polygon, 1));
    }
  }
  return out;
}

MatchCounts match_counts(const std::vector<ScoredRegion>& dets,
                         const std::vector<TextInstance>& gts,
                         const std::vector<std::vector<double>>& ious,
                         double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  MatchCounts c;
  std::vector<bool> matched(gts.size(), false);
  for (std::size_t i : order) {
    int best = -1;
    double best_iou = -1.0;
    bool covers_ignore = false;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double iou = ious[i][j];
      if (iou < iou_threshold) continue;
      if (gts[j].ignore) {
        covers_ignore = true;
      } else if (!matched[j] && iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      matched[best] = true;
      ++c.tp;
    } else if (covers_ignore) {
      ++c.ignored;
    } else {
      ++c.fp;
    }
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!gts[j].ignore && !matched[j]) ++c.fn;
  }
  return c;
}

ThresholdScore score_counts(const MatchCounts& counts, double iou_threshold) {
  ThresholdScore s;
  s.iou_threshold = iou_threshold;
  s.counts = counts;
  const int dets = counts.tp + counts.fp;
  const int gts = counts.tp + counts.fn;
  s.precision = dets > 0 ? static_cast<double>(counts.tp) / dets
                         : (gts == 0 ? 1.0 : 0.0);
  s.recall = gts > 0 ? static_cast<double>(counts.tp) / gts
                     : (dets == 0 ? 1.0 : 0.0);
  s.f_measure = s.precision + s.recall > 0.0
                    ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                    : 0.0;
  return s;
}

ThresholdScore match_and_score(const std::vector<ScoredRegion>& dets,
                               const std::vector<TextInstance>& gts,
                               double iou_threshold) {
  return score_counts(
      match_counts(dets, gts, iou_matrix(dets, gts), iou_threshold),
      iou_threshold);
}

const std::vector<double>& default_iou_thresholds() {
  static const std::vector<double> kThresholds{0.5, 0.6, 0.7, 0.8};
  return kThresholds;
}

EvalReport evaluate_corpus(const std::vector<ImageDetections>& dets,
                           const std::vector<CorpusRecord>& gts,
                           const std::vector<double>& iou_thresholds,
                           int jobs) {
  std::map<std::string, const ImageDetections*> by_id;
  for (const auto& d : dets) by_id[d.image_id] = &d;

  const std::vector<ScoredRegion> none;
  std::vector<std::vector<MatchCounts>> per_image(
      gts.size(), std::vector<MatchCounts>(iou_thresholds.size()));
  parallel_for(gts.size(), jobs, [&](std::size_t i) {
    const auto it = by_id.find(gts[i].image_id);
    const auto& regions = it == by_id.end() ? none : it->second->detections;
    const auto ious = iou_matrix(regions, gts[i].instances);
    for (std::size_t t = 0; t < iou_thresholds.size(); ++t) {
      per_image[i][t] =
          match_counts(regions, gts[i].instances, ious, iou_thresholds[t]);
    }
  });

  EvalReport report;
  report.images = static_cast<int>(gts.size());
  for (std::size_t t = 0; t < iou_thresholds.size(); ++t) {
    MatchCounts total;
    for (const auto& img : per_image) total += img[t];
    report.thresholds.push_back(score_counts(total, iou_thresholds[t]));
  }
  return report;
}

bool is_challenging(const Polygon& poly, int image_width, int image_height) {
  const Box box = bounding_box(poly);
  const double box_area = box.area();
  const double longest_image = std::max(image_width, image_height);
  const double longest_box = std::max(box.width(), box.height());
  const bool sparse = box_area > 0.0 && poly.area() < 0.5 * box_area;
  const bool long_text = longest_box > 0.75 * longest_image;
  return sparse || long_text;
}

std::vector<CorpusRecord> challenging_subset(
    const std::vector<CorpusRecord>& corpus) {
  std::vector<CorpusRecord> out;
  for (const auto& rec : corpus) {
    const bool keep = std::any_of(
        rec.instances.begin(), rec.instances.end(), [&](const TextInstance& t) {
          return !t.ignore && is_challenging(t.polygon, rec.width, rec.height);
        });
    if (keep) out.push_back(rec);
  }
  return out;
}

}  // namespace textdct
