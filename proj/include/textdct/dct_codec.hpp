#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "textdct/geometry.hpp"

namespace textdct {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square k x k real grid addressed as (row, col). The tag separates the
/// spatial mask domain from the frequency domain at compile time.
template <class Tag>
class SquareGrid {
 public:
  SquareGrid() = default;
  explicit SquareGrid(int k) : k_(k), values_(checked_size(k), 0.0) {}
  SquareGrid(int k, std::vector<double> values)
      : k_(k), values_(std::move(values)) {
    if (values_.size() != checked_size(k)) {
      throw CodecError("SquareGrid: value count does not match k*k");
    }
  }

  int k() const { return k_; }
  double& at(int row, int col) {
    return values_[static_cast<std::size_t>(row) * k_ + col];
  }
  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * k_ + col];
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  static std::size_t checked_size(int k) {
    if (k <= 0) throw CodecError("SquareGrid: k must be positive");
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  }

  int k_ = 0;
  std::vector<double> values_;
};

struct MaskDomain {};
struct FrequencyDomain {};

/// Canonical K x K mask. Encoded masks hold values in [0,1]; decoded grids
/// may stray slightly outside that range.
using MaskGrid = SquareGrid<MaskDomain>;
/// Orthonormal DCT-II coefficients, (row, col) = (u, v).
using Spectrum = SquareGrid<FrequencyDomain>;

/// Leading zigzag coefficients of a K x K spectrum.
struct DctMaskVector {
  int k = 0;
  std::vector<double> coeffs;
  /// Set by encode when the source mask had no foreground.
  bool from_empty_mask = false;

  int n() const { return static_cast<int>(coeffs.size()); }
};

struct FreqIndex {
  int u = 0;
  int v = 0;
  friend bool operator==(const FreqIndex&, const FreqIndex&) = default;
};

/// Normalization constant C(w): 1/sqrt(2) for w = 0, else 1.
double dct_norm(int w);

Spectrum dct2(const MaskGrid& mask);
MaskGrid idct2(const Spectrum& spectrum);

/// JPEG-style anti-diagonal scan. Diagonal d = u + v runs from high u to low
/// u when d is even and from low u to high u when d is odd. The returned
/// reference stays valid for the life of the program.
const std::vector<FreqIndex>& zigzag_order(int k);

/// Maps a binary mask of any size onto a K x K grid by sampling the source
/// at each canonical cell center (nearest neighbour).
MaskGrid canonical_from_mask(const BinaryMask& mask, int k);

/// Rasterizes the polygon with its bounding box stretched onto [0,K)^2.
MaskGrid canonical_from_polygon(const Polygon& poly, int k);

DctMaskVector encode(const MaskGrid& mask, int n);
DctMaskVector encode(const BinaryMask& mask, int k, int n);
DctMaskVector encode(const Polygon& poly, int k, int n);

/// Zero-pads to K^2 in zigzag order and inverts the transform.
MaskGrid decode(const DctMaskVector& vec);

/// value >= threshold -> 1.
BinaryMask binarize(const MaskGrid& grid, double threshold);

/// Bilinear sample at continuous grid coordinates, where cell (r, c) has its
/// center at (c + 0.5, r + 0.5). Coordinates outside the grid clamp to the
/// nearest edge value.
double sample_bilinear(const MaskGrid& grid, double x, double y);

/// Row-major width x height resize with half-pixel centers.
std::vector<double> resize_bilinear(const MaskGrid& grid, int width,
                                    int height);

/// IOU between the binarized reconstruction and the canonical ground truth.
double reconstruction_iou(const Polygon& poly, int k, int n, double threshold);

}  // namespace textdct
