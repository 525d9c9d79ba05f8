#include "textdct/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace textdct {

RgbImage::RgbImage(int width, int height, Color fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("RgbImage: dimensions must be positive");
  }
  rgb_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < rgb_.size(); i += 3) {
    rgb_[i] = fill[0];
    rgb_[i + 1] = fill[1];
    rgb_[i + 2] = fill[2];
  }
}

RgbImage::Color RgbImage::pixel(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {rgb_[o], rgb_[o + 1], rgb_[o + 2]};
}

void RgbImage::set(int x, int y, Color c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  rgb_[o] = c[0];
  rgb_[o + 1] = c[1];
  rgb_[o + 2] = c[2];
}

void RgbImage::fill_polygon(const Polygon& poly, Color c, double alpha) {
  if (poly.size() < 3) return;
  const BinaryMask m = rasterize_polygon(poly, width_, height_).mask;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!m.at(y, x)) continue;
      Color cur = pixel(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        cur[ch] = static_cast<std::uint8_t>(
            std::lround((1.0 - alpha) * cur[ch] + alpha * c[ch]));
      }
      set(x, y, cur);
    }
  }
}

void RgbImage::stroke_polygon(const Polygon& poly, Color c, int thickness) {
  const auto& v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    line(v[i], v[(i + 1) % v.size()], c, thickness);
  }
}

void RgbImage::line(Point a, Point b, Color c, int thickness) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const int x = static_cast<int>(std::floor(a.x + t * (b.x - a.x)));
    const int y = static_cast<int>(std::floor(a.y + t * (b.y - a.y)));
    for (int dy = lo; dy <= hi; ++dy) {
      for (int dx = lo; dx <= hi; ++dx) set(x + dx, y + dy, c);
    }
  }
}

void RgbImage::write_png(const std::filesystem::path& path) const {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"),
                                           &std::fclose);
  if (!fp) throw std::runtime_error("cannot open for writing: " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width_, height_, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height_; ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           rgb_.data() + static_cast<std::size_t>(y) * width_ * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace textdct
