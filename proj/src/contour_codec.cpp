#include "textdct/contour_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "textdct/corpus.hpp"
#include "textdct/parallel.hpp"

namespace textdct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> unit_phasor(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

// Evaluation frame: the instance box padded so decoded contours that spill
// over the box are still counted, snapped to whole pixels.
Box eval_frame(const Box& box, int& width, int& height) {
  const double pad = std::ceil(0.1 * std::max(box.width(), box.height())) + 1;
  Box frame{std::floor(box.x_min - pad), std::floor(box.y_min - pad), 0, 0};
  width = static_cast<int>(std::ceil(box.x_max + pad - frame.x_min));
  height = static_cast<int>(std::ceil(box.y_max + pad - frame.y_min));
  frame.x_max = frame.x_min + width;
  frame.y_max = frame.y_min + height;
  return frame;
}

BinaryMask dct_reconstruction(const Polygon& poly, const Box& box,
                              const Box& frame, int width, int height,
                              const DctParams& params) {
  const MaskGrid grid = decode(encode(poly, params.k, params.n));
  BinaryMask mask(width, height);
  const double sx = params.k / box.width();
  const double sy = params.k / box.height();
  for (int r = 0; r < height; ++r) {
    const double py = frame.y_min + r + 0.5;
    if (py < box.y_min || py >= box.y_max) continue;
    for (int c = 0; c < width; ++c) {
      const double px = frame.x_min + c + 0.5;
      if (px < box.x_min || px >= box.x_max) continue;
      const double v =
          sample_bilinear(grid, (px - box.x_min) * sx, (py - box.y_min) * sy);
      mask.set(r, c, v >= params.threshold);
    }
  }
  return mask;
}

}  // namespace

Polygon ContourSignal::to_polygon() const {
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (const auto& z : points) pts.push_back({z.real(), z.imag()});
  return Polygon(std::move(pts));
}

ContourSignal resample_contour(const Polygon& poly, int t) {
  if (t < 4) throw CodecError("resample_contour: need at least 4 samples");
  const Polygon p = poly.normalized();
  const double length = p.perimeter();
  if (!(length > 0.0)) {
    throw CodecError("resample_contour: zero-perimeter polygon");
  }
  const Box box = bounding_box(p);
  const auto& v = p.vertices();
  const std::size_t n = v.size();

  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::hypot(v[i].x - box.x_min, v[i].y - box.y_min);
    if (d < best) {
      best = d;
      start = i;
    }
  }

  std::vector<Point> ring(n);
  for (std::size_t i = 0; i < n; ++i) ring[i] = v[(start + i) % n];

  ContourSignal out;
  out.points.reserve(t);
  const double step = length / t;
  std::size_t edge = 0;
  double edge_start = 0.0;
  double edge_len = std::hypot(ring[1 % n].x - ring[0].x,
                               ring[1 % n].y - ring[0].y);
  for (int i = 0; i < t; ++i) {
    const double s = i * step;
    while (edge + 1 < n && s >= edge_start + edge_len) {
      edge_start += edge_len;
      ++edge;
      const Point& a = ring[edge];
      const Point& b = ring[(edge + 1) % n];
      edge_len = std::hypot(b.x - a.x, b.y - a.y);
    }
    const Point& a = ring[edge];
    const Point& b = ring[(edge + 1) % n];
    const double f = edge_len > 0.0 ? (s - edge_start) / edge_len : 0.0;
    out.points.emplace_back(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y));
  }
  return out;
}

FourierDescriptor dft_encode(const ContourSignal& signal, int m) {
  const int t = signal.size();
  if (m < 0 || 2 * m + 1 > t) {
    throw CodecError("dft_encode: need 0 <= m and 2m + 1 <= T");
  }
  FourierDescriptor desc;
  desc.m = m;
  desc.coeffs.assign(2 * m + 1, {0.0, 0.0});
  for (int f = -m; f <= m; ++f) {
    std::complex<double> acc{0.0, 0.0};
    for (int s = 0; s < t; ++s) {
      acc += signal.points[s] * unit_phasor(-kTwoPi * f * s / t);
    }
    desc.coeffs[f + m] = acc / static_cast<double>(t);
  }
  return desc;
}

ContourSignal dft_decode(const FourierDescriptor& desc, int t) {
  if (t < 1) throw CodecError("dft_decode: need at least one sample");
  ContourSignal out;
  out.points.reserve(t);
  for (int s = 0; s < t; ++s) {
    std::complex<double> z{0.0, 0.0};
    for (int f = -desc.m; f <= desc.m; ++f) {
      z += desc.at(f) * unit_phasor(kTwoPi * f * s / t);
    }
    out.points.push_back(z);
  }
  return out;
}

int matched_frequency_pairs(int n) { return std::max(0, (n / 2 - 1) / 2); }

double pixel_reconstruction_iou(const Polygon& poly, const DctParams& params) {
  if (!poly.valid()) throw CodecError("pixel_reconstruction_iou: invalid polygon");
  const Box box = bounding_box(poly);
  int w = 0;
  int h = 0;
  const Box frame = eval_frame(box, w, h);
  const BinaryMask gt =
      rasterize_in_frame(std::span<const Polygon>(&poly, 1), frame, w, h);
  return mask_iou(dct_reconstruction(poly, box, frame, w, h, params), gt);
}

CompareReport codec_compare(const std::vector<CorpusRecord>& corpus,
                            const DctParams& dct, const DftParams& dft,
                            int jobs) {
  struct Item {
    std::size_t record;
    int instance;
  };
  std::vector<Item> items;
  for (std::size_t r = 0; r < corpus.size(); ++r) {
    for (std::size_t i = 0; i < corpus[r].instances.size(); ++i) {
      const auto& inst = corpus[r].instances[i];
      if (!inst.ignore && inst.polygon.valid()) {
        items.push_back({r, static_cast<int>(i)});
      }
    }
  }
  if (items.empty()) throw CodecError("codec_compare: empty corpus");

  const int m = dft.m > 0 ? dft.m : matched_frequency_pairs(dct.n);
  const int samples = dft.samples > 0 ? dft.samples : std::max(4 * m + 4, 256);
  if (2 * m + 1 > samples) {
    throw CodecError("codec_compare: 2m + 1 exceeds the sample count");
  }

  CompareReport report;
  report.rows.resize(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t idx) {
    const auto& rec = corpus[items[idx].record];
    const Polygon& poly = rec.instances[items[idx].instance].polygon;
    const Box box = bounding_box(poly);
    int w = 0;
    int h = 0;
    const Box frame = eval_frame(box, w, h);

    const BinaryMask gt =
        rasterize_in_frame(std::span<const Polygon>(&poly, 1), frame, w, h);

    const BinaryMask dct_mask = dct_reconstruction(poly, box, frame, w, h, dct);

    const ContourSignal sig = resample_contour(poly, samples);
    const Polygon dft_poly = dft_decode(dft_encode(sig, m), samples).to_polygon();
    const BinaryMask dft_mask =
        rasterize_in_frame(std::span<const Polygon>(&dft_poly, 1), frame, w, h);

    const Polygon box_poly({{box.x_min, box.y_min},
                            {box.x_max, box.y_min},
                            {box.x_max, box.y_max},
                            {box.x_min, box.y_max}});
    const BinaryMask box_mask =
        rasterize_in_frame(std::span<const Polygon>(&box_poly, 1), frame, w, h);

    auto& row = report.rows[idx];
    row.image_id = rec.image_id;
    row.instance = items[idx].instance;
    row.dct_iou = mask_iou(dct_mask, gt);
    row.dft_iou = mask_iou(dft_mask, gt);
    row.box_iou = mask_iou(box_mask, gt);
  });

  auto& s = report.summary;
  s.m = m;
  s.samples = samples;
  s.thresholds = {0.5, 0.6, 0.7, 0.8};
  const double count = static_cast<double>(report.rows.size());
  for (const auto& row : report.rows) {
    s.dct_mean += row.dct_iou / count;
    s.dft_mean += row.dft_iou / count;
    s.box_mean += row.box_iou / count;
  }
  for (double thr : s.thresholds) {
    double dct_hits = 0;
    double dft_hits = 0;
    for (const auto& row : report.rows) {
      dct_hits += row.dct_iou >= thr;
      dft_hits += row.dft_iou >= thr;
    }
    s.dct_hit_rate.push_back(dct_hits / count);
    s.dft_hit_rate.push_back(dft_hits / count);
  }
  return report;
}

}  // namespace textdct
