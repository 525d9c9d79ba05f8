#pragma once

#include <string>
#include <vector>

#include "textdct/corpus.hpp"
#include "textdct/geometry.hpp"

namespace textdct {

/// A detection as seen by the evaluator: its region is the union of the
/// contours, each even-odd filled.
struct ScoredRegion {
  std::vector<Polygon> contours;
  double score = 0.0;
};

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  /// Detections excluded for covering a "DO NOT CARE" region.
  int ignored = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    ignored += o.ignored;
    return *this;
  }
};

struct ThresholdScore {
  double iou_threshold = 0.5;
  MatchCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct EvalReport {
  std::vector<ThresholdScore> thresholds;
  int images = 0;

  /// Entry for the given threshold; throws std::out_of_range when absent.
  const ThresholdScore& at(double iou_threshold) const;
};

/// Pairwise region IOU, rows = detections, cols = ground truths.
std::vector<std::vector<double>> iou_matrix(
    const std::vector<ScoredRegion>& dets,
    const std::vector<TextInstance>& gts);

/// Greedy one-to-one matching in descending score order (ties keep input
/// order) against a precomputed IOU matrix.
MatchCounts match_counts(const std::vector<ScoredRegion>& dets,
                         const std::vector<TextInstance>& gts,
                         const std::vector<std::vector<double>>& ious,
                         double iou_threshold);

/// P, R and F from counts. With no detections and no ground truth all three
/// are 1; with detections but no ground truth P is 0.
ThresholdScore score_counts(const MatchCounts& counts, double iou_threshold);

ThresholdScore match_and_score(const std::vector<ScoredRegion>& dets,
                               const std::vector<TextInstance>& gts,
                               double iou_threshold);

const std::vector<double>& default_iou_thresholds();

struct ImageDetections {
  std::string image_id;
  std::vector<ScoredRegion> detections;
};

/// Corpus-level scores; counts are summed over images before P/R/F.
/// Ground-truth images without a detection entry count as having none.
EvalReport evaluate_corpus(const std::vector<ImageDetections>& dets,
                           const std::vector<CorpusRecord>& gts,
                           const std::vector<double>& iou_thresholds,
                           int jobs = 1);

/// An instance is challenging when its polygon covers less than half of its
/// box, or the box's longer side exceeds 3/4 of the image's longer side.
bool is_challenging(const Polygon& poly, int image_width, int image_height);

/// Records with at least one non-ignored challenging instance.
std::vector<CorpusRecord> challenging_subset(
    const std::vector<CorpusRecord>& corpus);

}  // namespace textdct
