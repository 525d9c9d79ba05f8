#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace textdct {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in pixel coordinates.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }

  friend bool operator==(const Box&, const Box&) = default;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an inward offset consumes the whole polygon.
class EmptyKernelError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Closed polygon; the last vertex connects back to the first.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

  /// Shoelace area; positive for counter-clockwise order in a y-up frame.
  double signed_area() const;
  double area() const;
  double perimeter() const;
  Point centroid() const;

  bool finite() const;
  /// True when no two non-adjacent edges intersect.
  bool simple() const;
  /// At least three vertices, finite, and non-zero area.
  bool valid() const;

  /// Copy with positive signed area.
  Polygon normalized() const;

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Row-major 0/1 raster.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int row, int col, std::uint8_t v) {
    data_[static_cast<std::size_t>(row) * width_ + col] = v ? 1 : 0;
  }
  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Rasterized {
  BinaryMask mask;
  bool degenerate = false;
};

/// Even-odd containment; points exactly on a left or top edge count as inside.
bool contains(const Polygon& poly, Point p);

Box bounding_box(const Polygon& poly);
Box bounding_box(std::span<const Polygon> polys);

/// Cell (row, col) is set iff its center (col + 0.5, row + 0.5) is inside.
Rasterized rasterize_polygon(const Polygon& poly, int width, int height);

/// Rasterizes after mapping `frame` affinely onto the [0,width) x [0,height)
/// grid. Several polygons are combined by union, each one even-odd filled.
BinaryMask rasterize_in_frame(std::span<const Polygon> polys, const Box& frame,
                              int width, int height);

/// Inward offset by A(1 - r^2) / L with mitered corners.
/// Throws EmptyKernelError when nothing remains.
Polygon shrink_polygon(const Polygon& poly, double rate);

/// Offset distance used by shrink_polygon.
double shrink_distance(const Polygon& poly, double rate);

/// Area IOU estimated on a raster of the union bounding box whose longer
/// side has `resolution` cells. Regions are unions of even-odd polygons.
double region_iou(std::span<const Polygon> a, std::span<const Polygon> b,
                  int resolution = 1024);
double polygon_iou(const Polygon& a, const Polygon& b, int resolution = 1024);

/// Continuous box IOU; 0 when the union is empty.
double box_iou(const Box& a, const Box& b);

/// IOU of two masks of equal size; 0 when both are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace textdct
