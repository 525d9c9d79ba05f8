#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "textdct/corpus.hpp"
#include "textdct/dct_codec.hpp"

namespace textdct {

struct LabelParams {
  int stride = 8;
  double shrink_rate = 0.5;
  int k = 64;
  int n = 300;
  /// Give an instance whose kernel covers no cell center the single cell
  /// nearest its kernel (or polygon) centroid.
  bool fallback_single_cell = true;
};

/// Training targets on a stride-s grid. Cell (r, c) has its center at
/// ((c + 0.5) * stride, (r + 0.5) * stride).
struct LabelGrid {
  int stride = 0;
  int rows = 0;
  int cols = 0;
  /// 1 where the cell is a positive sample.
  std::vector<std::uint8_t> kernel;
  /// 1 where the cell lies in a "DO NOT CARE" region and is excluded.
  std::vector<std::uint8_t> ignore;
  /// (l, t, r, b) distances from the cell center to the instance box;
  /// zero at non-positive cells.
  std::vector<std::array<float, 4>> box_target;
  /// Index into vector_table, -1 at non-positive cells.
  std::vector<std::int32_t> assignment;
  /// One vector per input instance (ignored instances get an empty one).
  std::vector<DctMaskVector> vector_table;
  /// Cells claimed by more than one instance.
  int conflicts = 0;
  /// Instances whose kernel collapsed or covered no cell center.
  int fallback_instances = 0;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  /// Number of positive cells.
  int positives() const;
  Point cell_center(std::size_t cell) const;
};

/// Text kernel sampling: a cell is positive iff its center lies in an
/// instance's shrunk kernel. Overlaps go to the smallest kernel.
LabelGrid generate_labels(const std::vector<TextInstance>& instances,
                          int image_width, int image_height,
                          const LabelParams& params);

/// Center-sampling baseline: positives are the cells within `radius_cells`
/// (Chebyshev) of the cell holding each instance's centroid.
LabelGrid generate_labels_center_sampling(
    const std::vector<TextInstance>& instances, int image_width,
    int image_height, const LabelParams& params, int radius_cells);

/// Clamps every vertex into [0, width] x [0, height].
Polygon clip_to_image(const Polygon& poly, int width, int height);

}  // namespace textdct
