#pragma once

#include <complex>
#include <string>
#include <vector>

#include "textdct/dct_codec.hpp"
#include "textdct/geometry.hpp"

namespace textdct {

struct CorpusRecord;

/// Closed contour sampled uniformly by arc length, x + i*y per sample.
struct ContourSignal {
  std::vector<std::complex<double>> points;

  int size() const { return static_cast<int>(points.size()); }
  Polygon to_polygon() const;
};

/// Fourier coefficients for frequencies -m..m, stored at index f + m.
struct FourierDescriptor {
  int m = 0;
  std::vector<std::complex<double>> coeffs;

  std::complex<double> at(int freq) const { return coeffs[freq + m]; }
};

/// `t` samples equally spaced along the boundary, starting at the vertex
/// closest to the bounding box's top-left corner and walking in the
/// positive-area direction.
ContourSignal resample_contour(const Polygon& poly, int t);

/// c_f = (1/T) sum_t z_t exp(-2 pi i f t / T), f in [-m, m].
FourierDescriptor dft_encode(const ContourSignal& signal, int m);

/// z_s = sum_f c_f exp(2 pi i f s / t), s in [0, t).
ContourSignal dft_decode(const FourierDescriptor& desc, int t);

/// Frequency pairs giving roughly the same number of real values as an
/// n-coefficient DCT vector: 2(2m + 1) <= n.
int matched_frequency_pairs(int n);

struct DctParams {
  int k = 64;
  int n = 300;
  double threshold = 0.35;
};

struct DftParams {
  int m = 0;  // 0 selects matched_frequency_pairs(n)
  int samples = 0;  // 0 selects max(4m + 4, 256)
};

struct CompareRow {
  std::string image_id;
  int instance = 0;
  double dct_iou = 0.0;
  double dft_iou = 0.0;
  double box_iou = 0.0;
};

struct CompareSummary {
  int m = 0;
  int samples = 0;
  double dct_mean = 0.0;
  double dft_mean = 0.0;
  double box_mean = 0.0;
  /// Fraction of instances reconstructed at IOU >= threshold, per codec.
  std::vector<double> thresholds;
  std::vector<double> dct_hit_rate;
  std::vector<double> dft_hit_rate;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  CompareSummary summary;
};

/// Reconstruction IOU of both codecs against each non-ignored instance,
/// measured on the instance's own box at one cell per pixel.
/// Throws CodecError on an empty corpus.
// Reconstruction IOU measured in image pixels: the decoded K x K grid is
// resampled into the instance box and compared with the polygon raster.
double pixel_reconstruction_iou(const Polygon& poly, const DctParams& params);

CompareReport codec_compare(const std::vector<CorpusRecord>& corpus,
                            const DctParams& dct, const DftParams& dft,
                            int jobs = 1);

}  // namespace textdct
