#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "textdct/contour_codec.hpp"
#include "textdct/corpus.hpp"
#include "textdct/synthetic.hpp"

using namespace textdct;

namespace {

constexpr double kPi = std::numbers::pi;

ContourSignal circle(int t, std::complex<double> c, double rx, double ry,
                     double phase = 0.0) {
  ContourSignal s;
  for (int i = 0; i < t; ++i) {
    const double a = 2 * kPi * i / t + phase;
    s.points.push_back(c + std::complex<double>(rx * std::cos(a), ry * std::sin(a)));
  }
  return s;
}

double sample_error(const ContourSignal& a, const ContourSignal& b) {
  double e = 0.0;
  for (int i = 0; i < a.size(); ++i) e += std::norm(a.points[i] - b.points[i]);
  return e;
}

}  // namespace

TEST(Resample, UniformSpacingOnSquare) {
  const Polygon sq({{0, 0}, {8, 0}, {8, 8}, {0, 8}});
  const auto s = resample_contour(sq, 32);
  ASSERT_EQ(s.size(), 32);
  for (int i = 0; i < 32; ++i)
    EXPECT_NEAR(std::abs(s.points[(i + 1) % 32] - s.points[i]), 1.0, 1e-9);
  EXPECT_NEAR(s.points[0].real(), 0.0, 1e-12);
  EXPECT_NEAR(s.points[0].imag(), 0.0, 1e-12);
}

TEST(Resample, PathLengthMatchesPerimeter) {
  SyntheticShapeSpec spec;
  spec.kind = CurveKind::kArc;
  const Polygon p = synthesize_shape(spec);
  // Dense sampling lands on every corner closely enough that the summed
  // chords converge on the perimeter.
  const auto s = resample_contour(p, 20000);
  double len = 0.0;
  for (int i = 0; i < s.size(); ++i)
    len += std::abs(s.points[(i + 1) % s.size()] - s.points[i]);
  EXPECT_NEAR(len, p.perimeter(), 1e-3 * p.perimeter());
}

TEST(Resample, RecoversVerticesOfRegularPolygon) {
  std::vector<Point> v;
  for (int i = 0; i < 6; ++i)
    v.push_back({50 + 20 * std::cos(2 * kPi * i / 6), 50 + 20 * std::sin(2 * kPi * i / 6)});
  const Polygon hex(v);
  const auto s = resample_contour(hex, 6);
  for (const auto& z : s.points) {
    double best = 1e9;
    for (const auto& p : v) best = std::min(best, std::hypot(z.real() - p.x, z.imag() - p.y));
    EXPECT_LT(best, 1e-9);
  }
}

TEST(Resample, Errors) {
  EXPECT_THROW(resample_contour(Polygon({{0, 0}, {1, 0}, {0, 1}}), 3), CodecError);
  EXPECT_THROW(resample_contour(Polygon({{1, 1}, {1, 1}, {1, 1}}), 8), CodecError);
}

TEST(Dft, UnitCircleSingleFrequency) {
  const auto d = dft_encode(circle(64, 0.0, 1, 1), 10);
  for (int f = -10; f <= 10; ++f) {
    if (f == 1) {
      EXPECT_NEAR(d.at(f).real(), 1.0, 1e-12);
      EXPECT_NEAR(d.at(f).imag(), 0.0, 1e-12);
    } else {
      EXPECT_NEAR(std::abs(d.at(f)), 0.0, 1e-12);
    }
  }
}

TEST(Dft, DcIsCenter) {
  const auto d = dft_encode(circle(40, {7.0, -3.0}, 5, 5), 3);
  EXPECT_NEAR(d.at(0).real(), 7.0, 1e-12);
  EXPECT_NEAR(d.at(0).imag(), -3.0, 1e-12);
}

TEST(Dft, FullSpectrumRoundtrip) {
  SyntheticShapeSpec spec;
  spec.kind = CurveKind::kWave;
  spec.amplitude = 30;
  const auto s = resample_contour(synthesize_shape(spec), 101);
  const auto back = dft_decode(dft_encode(s, 50), 101);
  for (int i = 0; i < 101; ++i) EXPECT_LT(std::abs(back.points[i] - s.points[i]), 1e-6);
}

TEST(Dft, ParsevalAtFullSpectrum) {
  const auto s = resample_contour(synthesize_shape({}), 63);
  const auto d = dft_encode(s, 31);
  double sig = 0.0, coef = 0.0;
  for (const auto& z : s.points) sig += std::norm(z);
  for (const auto& c : d.coeffs) coef += std::norm(c);
  EXPECT_NEAR(coef * 63, sig, 1e-9 * sig);
}

TEST(Dft, EllipseExactAtOnePair) {
  const auto s = circle(128, {3, 4}, 30, 10, 0.3);
  EXPECT_LT(sample_error(dft_decode(dft_encode(s, 1), 128), s), 1e-18 * 128 + 1e-16);
}

TEST(Dft, DegenerateAtZeroPairs) {
  const auto s = circle(16, {2, 2}, 5, 5);
  const auto back = dft_decode(dft_encode(s, 0), 16);
  for (const auto& z : back.points) EXPECT_NEAR(std::abs(z - std::complex<double>(2, 2)), 0.0, 1e-12);
  EXPECT_FALSE(back.to_polygon().valid());
}

TEST(Dft, MorePairsNeverWorse) {
  SyntheticShapeSpec spec;
  spec.kind = CurveKind::kArc;
  spec.arc_angle = 4.5;
  const auto s = resample_contour(synthesize_shape(spec), 256);
  double prev = 1e300;
  for (int m = 0; m <= 127; m += 3) {
    const double e = sample_error(dft_decode(dft_encode(s, m), 256), s);
    EXPECT_LE(e, prev + 1e-9);
    prev = e;
  }
}

TEST(Dft, RejectsTooManyPairs) {
  EXPECT_THROW(dft_encode(circle(8, 0.0, 1, 1), 4), CodecError);
  EXPECT_THROW(dft_encode(circle(8, 0.0, 1, 1), -1), CodecError);
}

TEST(Budget, MatchedPairs) {
  EXPECT_EQ(matched_frequency_pairs(300), 74);
  for (int n : {10, 100, 300, 500}) {
    const int m = matched_frequency_pairs(n);
    EXPECT_LE(2 * (2 * m + 1), n);
    EXPECT_GT(2 * (2 * (m + 1) + 1), n);
  }
}

namespace {

CorpusRecord one(const Polygon& p, const std::string& id = "a") {
  return CorpusRecord{id, 640, 640, {TextInstance{p, false}}, {p}};
}

}  // namespace

TEST(Compare, EmptyCorpusThrows) {
  EXPECT_THROW(codec_compare({}, {}, {}), CodecError);
}

TEST(Compare, ConvexBlobsBeatBoxBaseline) {
  std::vector<CorpusRecord> corpus;
  for (int i = 0; i < 8; ++i) {
    std::vector<Point> v;
    for (int j = 0; j < 16; ++j) {
      const double a = 2 * kPi * j / 16;
      v.push_back({320 + (60 + 10 * i) * std::cos(a), 320 + (30 + 5 * i) * std::sin(a)});
    }
    corpus.push_back(one(Polygon(v), "blob" + std::to_string(i)));
  }
  const auto rep = codec_compare(corpus, {}, {});
  ASSERT_EQ(rep.rows.size(), 8u);
  for (const auto& r : rep.rows) {
    EXPECT_GE(r.dct_iou, r.box_iou);
    EXPECT_GE(r.dft_iou, r.box_iou);
  }
  EXPECT_EQ(rep.summary.m, 74);
  EXPECT_EQ(rep.summary.samples, 300);
}

TEST(Compare, Deterministic) {
  const Polygon p = synthesize_shape({});
  const auto rep = codec_compare({one(p, "x"), one(p, "y")}, {}, {}, 2);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].dct_iou, rep.rows[1].dct_iou);
  EXPECT_EQ(rep.rows[0].dft_iou, rep.rows[1].dft_iou);
  EXPECT_EQ(rep.rows[0].box_iou, rep.rows[1].box_iou);
}

TEST(Compare, StartVertexInvariance) {
  SyntheticShapeSpec spec;
  spec.kind = CurveKind::kWave;
  spec.amplitude = 25;
  const Polygon p = synthesize_shape(spec);
  std::vector<Point> rotated(p.vertices().begin() + 5, p.vertices().end());
  rotated.insert(rotated.end(), p.vertices().begin(), p.vertices().begin() + 5);
  const auto a = codec_compare({one(p)}, {}, {});
  const auto b = codec_compare({one(Polygon(rotated))}, {}, {});
  EXPECT_NEAR(a.rows[0].dft_iou, b.rows[0].dft_iou, 1e-3);
}

TEST(PixelIou, AxisAlignedRectangleIsExact) {
  const Polygon rect({{10, 20}, {74, 20}, {74, 52}, {10, 52}});
  EXPECT_DOUBLE_EQ(pixel_reconstruction_iou(rect, {64, 64 * 64, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(pixel_reconstruction_iou(rect, {64, 300, 0.35}), 1.0);
}

TEST(PixelIou, LosslessVectorStillPaysForResampling) {
  // The canonical grid is exact at n = K^2; the image-frame comparison is not,
  // because a 16 x 16 grid cannot follow a slanted edge across 200 pixels.
  const Polygon tri({{0, 0}, {200, 0}, {0, 200}});
  EXPECT_DOUBLE_EQ(reconstruction_iou(tri, 16, 256, 0.5), 1.0);
  const double iou = pixel_reconstruction_iou(tri, {16, 256, 0.5});
  EXPECT_LT(iou, 1.0);
  EXPECT_GT(iou, 0.9);
  EXPECT_GT(pixel_reconstruction_iou(tri, {64, 64 * 64, 0.5}), iou);
}

TEST(PixelIou, RejectsDegenerate) {
  EXPECT_THROW(pixel_reconstruction_iou(Polygon({{0, 0}, {1, 1}}), {}), CodecError);
}
