#include "textdct/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace textdct {

namespace {

struct Frame {
  Point origin;
  Point normal;
};

Frame centerline(const SyntheticShapeSpec& spec, double s) {
  const double L = spec.length;
  switch (spec.kind) {
    case CurveKind::kWave: {
      const double w = 2.0 * std::numbers::pi / spec.wavelength;
      const double y = spec.amplitude * std::sin(w * s);
      const double tx = 1.0;
      const double ty = spec.amplitude * w * std::cos(w * s);
      const double norm = std::hypot(tx, ty);
      return {{s - 0.5 * L, y}, {-ty / norm, tx / norm}};
    }
    case CurveKind::kArc: {
      const double radius = L / spec.arc_angle;
      const double phi = spec.arc_angle * (s / L - 0.5);
      return {{radius * std::sin(phi), radius * (1.0 - std::cos(phi))},
              {-std::sin(phi), std::cos(phi)}};
    }
    case CurveKind::kStraight:
      break;
  }
  return {{s - 0.5 * L, 0.0}, {0.0, 1.0}};
}

bool boxes_clear(const Box& a, const Box& b, double gap) {
  return a.x_max + gap <= b.x_min || b.x_max + gap <= a.x_min ||
         a.y_max + gap <= b.y_min || b.y_max + gap <= a.y_min;
}

}  // namespace

Polygon synthesize_shape(const SyntheticShapeSpec& spec) {
  if (spec.vertex_count < 6 || spec.vertex_count % 2 != 0) {
    throw std::invalid_argument("synthesize_shape: vertex_count must be even and >= 6");
  }
  if (!(spec.length > 0.0) || !(spec.half_width > 0.0)) {
    throw std::invalid_argument("synthesize_shape: length and half_width must be positive");
  }
  const int per_side = spec.vertex_count / 2;
  std::vector<Point> upper;
  std::vector<Point> lower;
  for (int i = 0; i < per_side; ++i) {
    const double t = static_cast<double>(i) / (per_side - 1);
    const Frame f = centerline(spec, t * spec.length);
    const double h =
        spec.half_width * (1.0 - 0.8 * spec.taper * std::abs(2.0 * t - 1.0));
    upper.push_back({f.origin.x + h * f.normal.x, f.origin.y + h * f.normal.y});
    lower.push_back({f.origin.x - h * f.normal.x, f.origin.y - h * f.normal.y});
  }
  std::vector<Point> pts(upper.begin(), upper.end());
  pts.insert(pts.end(), lower.rbegin(), lower.rend());

  const double c = std::cos(spec.rotation);
  const double s = std::sin(spec.rotation);
  for (auto& p : pts) p = {c * p.x - s * p.y, s * p.x + c * p.y};
  const Box b = bounding_box(Polygon(pts));
  const double dx = spec.center.x - 0.5 * (b.x_min + b.x_max);
  const double dy = spec.center.y - 0.5 * (b.y_min + b.y_max);
  for (auto& p : pts) p = {p.x + dx, p.y + dy};
  return Polygon(std::move(pts));
}

std::vector<CorpusRecord> generate_synthetic_corpus(std::uint64_t seed,
                                                    int count,
                                                    const SyntheticRanges& r) {
  if (count < 0) throw std::invalid_argument("synthetic corpus: negative count");
  constexpr int kAttempts = 200;
  PortableRng rng(seed);
  std::vector<CorpusRecord> out;
  out.reserve(count);
  for (int img = 0; img < count; ++img) {
    CorpusRecord rec;
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%05d", img);
    rec.image_id = id;
    rec.width = r.width;
    rec.height = r.height;
    const int wanted = rng.uniform_int(r.min_instances, r.max_instances);
    std::vector<Box> placed;
    for (int inst = 0; inst < wanted; ++inst) {
      for (int attempt = 0; attempt < kAttempts; ++attempt) {
        SyntheticShapeSpec spec;
        spec.vertex_count = r.vertex_count;
        spec.kind = static_cast<CurveKind>(rng.uniform_int(0, 2));
        spec.half_width = rng.uniform(r.min_half_width, r.max_half_width);
        spec.length =
            2.0 * spec.half_width * rng.uniform(r.min_aspect, r.max_aspect);
        spec.amplitude = rng.uniform(0.0, r.max_amplitude_ratio) * spec.length;
        spec.wavelength = rng.uniform(0.5, 1.5) * spec.length;
        spec.arc_angle = rng.uniform(0.5, r.max_arc_angle);
        spec.taper = rng.uniform(0.0, 0.5);
        spec.rotation = spec.kind == CurveKind::kArc
                            ? rng.uniform(-std::numbers::pi, std::numbers::pi)
                            : rng.uniform(-0.5, 0.5);
        spec.center = {rng.uniform(0.0, r.width), rng.uniform(0.0, r.height)};
        const bool ignore = rng.uniform() < r.ignore_probability;

        Polygon poly = synthesize_shape(spec);
        const Box b = bounding_box(poly);
        if (b.x_min < 1.0 || b.y_min < 1.0 || b.x_max > r.width - 1.0 ||
            b.y_max > r.height - 1.0) {
          continue;
        }
        if (!std::all_of(placed.begin(), placed.end(), [&](const Box& o) {
              return boxes_clear(b, o, r.spacing);
            })) {
          continue;
        }
        if (!poly.valid() || !poly.simple()) continue;
        placed.push_back(b);
        rec.originals.push_back(poly);
        rec.instances.push_back({std::move(poly), ignore});
        break;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace textdct
