#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "textdct/corpus.hpp"

namespace textdct {

enum class CurveKind {
  kStraight,  ///< straight band
  kWave,      ///< sinusoidal centerline
  kArc,       ///< circular-arc centerline, up to near-closed crescents
};

/// Shape of one synthetic text instance. The centerline is laid out along
/// +x around the origin, then rotated and translated to `center`.
struct SyntheticShapeSpec {
  CurveKind kind = CurveKind::kStraight;
  double length = 200.0;      ///< centerline arc length in pixels
  double half_width = 16.0;   ///< half of the stroke height
  double amplitude = 0.0;     ///< kWave only
  double wavelength = 200.0;  ///< kWave only
  double arc_angle = 3.0;     ///< kArc only, radians subtended
  double taper = 0.0;         ///< 0 = constant width, 1 = pointed ends
  double rotation = 0.0;      ///< radians
  Point center{320.0, 320.0};
  int vertex_count = 14;      ///< even, >= 6; split evenly over both sides
};

/// Builds the polygon for a spec; it may self-intersect for extreme specs.
Polygon synthesize_shape(const SyntheticShapeSpec& spec);

struct SyntheticRanges {
  int width = 640;
  int height = 640;
  int min_instances = 1;
  int max_instances = 4;
  double min_half_width = 8.0;
  double max_half_width = 32.0;
  double min_aspect = 1.0;   ///< length / (2 half_width)
  double max_aspect = 20.0;
  double max_amplitude_ratio = 0.25;  ///< amplitude / length
  double max_arc_angle = 5.2;         ///< radians
  int vertex_count = 14;
  /// Gap kept between instance boxes, in pixels.
  double spacing = 24.0;
  /// Probability that an instance is marked "DO NOT CARE".
  double ignore_probability = 0.0;
};

/// Deterministic corpus: the same seed yields byte-identical records on
/// every platform. Shapes that self-intersect or leave the canvas are
/// redrawn, up to a bounded number of attempts per instance.
std::vector<CorpusRecord> generate_synthetic_corpus(std::uint64_t seed,
                                                    int count,
                                                    const SyntheticRanges& ranges = {});

/// Uniform draws on top of std::mt19937_64, whose output sequence is fixed
/// by the standard (the std distributions are not).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace textdct
