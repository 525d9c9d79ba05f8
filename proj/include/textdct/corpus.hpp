#pragma once

#include <string>
#include <vector>

#include "textdct/geometry.hpp"

namespace textdct {

struct TextInstance {
  Polygon polygon;
  /// "DO NOT CARE" region: neither supervised nor penalized.
  bool ignore = false;
};

/// Annotations of one image. `instances` hold polygons clipped to the image;
/// `originals` keeps the polygons as they were read, in the same order.
struct CorpusRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<TextInstance> instances;
  std::vector<Polygon> originals;
};

}  // namespace textdct
