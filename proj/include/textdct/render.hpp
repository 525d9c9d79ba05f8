#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "textdct/geometry.hpp"

namespace textdct {

/// RGB canvas for static overlays.
class RgbImage {
 public:
  using Color = std::array<std::uint8_t, 3>;

  RgbImage(int width, int height, Color fill = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }
  Color pixel(int x, int y) const;
  void set(int x, int y, Color c);

  /// Fills the even-odd interior with `c` blended at `alpha`.
  void fill_polygon(const Polygon& poly, Color c, double alpha);
  /// Closed polyline of the given pixel thickness.
  void stroke_polygon(const Polygon& poly, Color c, int thickness = 2);

  void write_png(const std::filesystem::path& path) const;

 private:
  void line(Point a, Point b, Color c, int thickness);

  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

inline constexpr RgbImage::Color kGroundTruthColor{0, 170, 0};
inline constexpr RgbImage::Color kDetectionColor{220, 0, 0};
inline constexpr RgbImage::Color kIgnoreColor{150, 150, 150};

}  // namespace textdct
