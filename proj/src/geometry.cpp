#include "textdct/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace textdct {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

// Sorted x positions where the horizontal line at `y` crosses the boundary,
// using the half-open rule min(y0,y1) <= y < max(y0,y1).
void scanline_crossings(const std::vector<Point>& pts, double y,
                        std::vector<double>& out) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& p = pts[j];
    const Point& q = pts[i];
    if ((p.y <= y) != (q.y <= y)) {
      out.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
    }
  }
}

void fill_even_odd(const std::vector<Point>& pts, BinaryMask& mask) {
  std::vector<double> xs;
  const int w = mask.width();
  for (int row = 0; row < mask.height(); ++row) {
    xs.clear();
    scanline_crossings(pts, row + 0.5, xs);
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Cell centers c + 0.5 in [xs[k], xs[k+1]).
      const double lo = std::ceil(xs[k] - 0.5);
      const double hi = std::ceil(xs[k + 1] - 0.5);
      const int c0 = static_cast<int>(std::clamp(lo, 0.0, double(w)));
      const int c1 = static_cast<int>(std::clamp(hi, 0.0, double(w)));
      for (int c = c0; c < c1; ++c) mask.set(row, c, 1);
    }
  }
}

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;


// Each edge moved inward by d, neighbours joined at their line intersection.
// Empty when an edge flips or vanishes, or the result crosses itself.
std::optional<Polygon> miter_offset(const Polygon& poly, double d) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  std::vector<Point> base(n), dir(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) return std::nullopt;
    dir[i] = {(b.x - a.x) / len, (b.y - a.y) / len};
    // Interior lies to the left for positive signed area.
    base[i] = {a.x - d * dir[i].y, a.y + d * dir[i].x};
  }
  std::vector<Point> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const double denom = dir[prev].x * dir[i].y - dir[prev].y * dir[i].x;
    if (std::abs(denom) < 1e-12) {
      if (dir[prev].x * dir[i].x + dir[prev].y * dir[i].y < 0.0) return std::nullopt;
      out[i] = base[i];
      continue;
    }
    const double t = ((base[i].x - base[prev].x) * dir[i].y -
                      (base[i].y - base[prev].y) * dir[i].x) /
                     denom;
    out[i] = {base[prev].x + t * dir[prev].x, base[prev].y + t * dir[prev].y};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = out[i];
    const Point b = out[(i + 1) % n];
    if ((b.x - a.x) * dir[i].x + (b.y - a.y) * dir[i].y <= 0.0) return std::nullopt;
  }
  Polygon result(std::move(out));
  if (!result.simple() || !(result.signed_area() > 0.0)) return std::nullopt;
  return result;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {}

double Polygon::signed_area() const {
  const std::size_t n = vertices_.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += vertices_[j].x * vertices_[i].y - vertices_[i].x * vertices_[j].y;
  }
  return 0.5 * acc;
}

double Polygon::area() const { return std::abs(signed_area()); }

double Polygon::perimeter() const {
  const std::size_t n = vertices_.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += std::hypot(vertices_[i].x - vertices_[j].x,
                      vertices_[i].y - vertices_[j].y);
  }
  return acc;
}

Point Polygon::centroid() const {
  const std::size_t n = vertices_.size();
  const double a = signed_area();
  if (n == 0) return {};
  if (a == 0.0) {
    Point mean;
    for (const auto& p : vertices_) {
      mean.x += p.x;
      mean.y += p.y;
    }
    return {mean.x / n, mean.y / n};
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double f =
        vertices_[j].x * vertices_[i].y - vertices_[i].x * vertices_[j].y;
    cx += (vertices_[j].x + vertices_[i].x) * f;
    cy += (vertices_[j].y + vertices_[i].y) * f;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool Polygon::finite() const {
  return std::all_of(vertices_.begin(), vertices_.end(), [](const Point& p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
  });
}

bool Polygon::simple() const {
  const std::size_t n = vertices_.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex with edge i.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, vertices_[j], vertices_[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

bool Polygon::valid() const {
  return vertices_.size() >= 3 && finite() && area() > 0.0;
}

Polygon Polygon::normalized() const {
  if (signed_area() >= 0.0) return *this;
  std::vector<Point> rev(vertices_.rbegin(), vertices_.rend());
  return Polygon(std::move(rev));
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) *
                static_cast<std::size_t>(std::max(height, 0)),
            0) {
  if (width < 0 || height < 0) {
    throw GeometryError("BinaryMask: negative dimensions");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

bool contains(const Polygon& poly, Point p) {
  const auto& pts = poly.vertices();
  const std::size_t n = pts.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = pts[j];
    const Point& b = pts[i];
    if ((a.y <= p.y) != (b.y <= p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) inside = !inside;
    }
  }
  return inside;
}

Box bounding_box(const Polygon& poly) {
  if (poly.size() == 0) return {};
  Box b{std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (const auto& p : poly.vertices()) {
    b.x_min = std::min(b.x_min, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.x_max = std::max(b.x_max, p.x);
    b.y_max = std::max(b.y_max, p.y);
  }
  return b;
}

Box bounding_box(std::span<const Polygon> polys) {
  bool first = true;
  Box out;
  for (const auto& p : polys) {
    if (p.size() == 0) continue;
    const Box b = bounding_box(p);
    if (first) {
      out = b;
      first = false;
    } else {
      out.x_min = std::min(out.x_min, b.x_min);
      out.y_min = std::min(out.y_min, b.y_min);
      out.x_max = std::max(out.x_max, b.x_max);
      out.y_max = std::max(out.y_max, b.y_max);
    }
  }
  return out;
}

Rasterized rasterize_polygon(const Polygon& poly, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw GeometryError("rasterize_polygon: grid dimensions must be positive");
  }
  if (!poly.finite()) {
    throw GeometryError("rasterize_polygon: non-finite vertex");
  }
  Rasterized out{BinaryMask(width, height), false};
  if (poly.size() < 3 || poly.area() == 0.0) {
    out.degenerate = true;
    return out;
  }
  fill_even_odd(poly.vertices(), out.mask);
  return out;
}

BinaryMask rasterize_in_frame(std::span<const Polygon> polys, const Box& frame,
                              int width, int height) {
  if (width <= 0 || height <= 0) {
    throw GeometryError("rasterize_in_frame: grid dimensions must be positive");
  }
  BinaryMask mask(width, height);
  const double fw = frame.width();
  const double fh = frame.height();
  if (!(fw > 0.0) || !(fh > 0.0)) return mask;
  const double sx = width / fw;
  const double sy = height / fh;
  std::vector<Point> mapped;
  for (const auto& poly : polys) {
    if (poly.size() < 3) continue;
    mapped.clear();
    mapped.reserve(poly.size());
    for (const auto& p : poly.vertices()) {
      mapped.push_back({(p.x - frame.x_min) * sx, (p.y - frame.y_min) * sy});
    }
    fill_even_odd(mapped, mask);
  }
  return mask;
}

double shrink_distance(const Polygon& poly, double rate) {
  const double perimeter = poly.perimeter();
  if (perimeter <= 0.0) return 0.0;
  return poly.area() * (1.0 - rate * rate) / perimeter;
}

Polygon shrink_polygon(const Polygon& poly, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw GeometryError("shrink_polygon: rate must lie in (0, 1]");
  }
  if (!poly.valid()) {
    throw GeometryError("shrink_polygon: polygon must have positive area");
  }
  const double d = shrink_distance(poly, rate);
  if (d == 0.0) return poly;
  if (auto exact = miter_offset(poly.normalized(), d)) return *exact;

  BgPolygon in;
  for (const auto& p : poly.vertices()) {
    bg::append(in.outer(), BgPoint(p.x, p.y));
  }
  bg::correct(in);

  BgMultiPolygon out;
  bg::strategy::buffer::distance_symmetric<double> distance(-d);
  bg::strategy::buffer::join_miter join;
  bg::strategy::buffer::end_flat end;
  bg::strategy::buffer::point_square point;
  bg::strategy::buffer::side_straight side;
  bg::buffer(in, out, distance, side, join, end, point);

  // A thin neck can split the kernel; keep the largest piece.
  const BgPolygon* best = nullptr;
  double best_area = 0.0;
  for (const auto& piece : out) {
    const double a = std::abs(bg::area(piece));
    if (a > best_area) {
      best_area = a;
      best = &piece;
    }
  }
  if (best == nullptr || best_area <= 0.0) {
    throw EmptyKernelError("shrink_polygon: offset collapses the polygon");
  }

  std::vector<Point> pts;
  const auto& ring = best->outer();
  pts.reserve(ring.size());
  for (const auto& p : ring) pts.push_back({p.x(), p.y()});
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  Polygon result(std::move(pts));
  if (!result.valid()) {
    throw EmptyKernelError("shrink_polygon: offset collapses the polygon");
  }
  return result.normalized();
}

double region_iou(std::span<const Polygon> a, std::span<const Polygon> b,
                  int resolution) {
  if (resolution <= 0) {
    throw GeometryError("region_iou: resolution must be positive");
  }
  std::vector<Polygon> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  Box frame = bounding_box(std::span<const Polygon>(all));
  const double extent = std::max(frame.width(), frame.height());
  if (!(extent > 0.0)) return 0.0;

  const double cell = extent / resolution;
  const int w = std::max(1, static_cast<int>(std::ceil(frame.width() / cell)));
  const int h = std::max(1, static_cast<int>(std::ceil(frame.height() / cell)));
  frame.x_max = frame.x_min + w * cell;
  frame.y_max = frame.y_min + h * cell;

  return mask_iou(rasterize_in_frame(a, frame, w, h),
                  rasterize_in_frame(b, frame, w, h));
}

double polygon_iou(const Polygon& a, const Polygon& b, int resolution) {
  return region_iou(std::span<const Polygon>(&a, 1),
                    std::span<const Polygon>(&b, 1), resolution);
}

double box_iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw GeometryError("mask_iou: mask dimensions differ");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    inter += static_cast<std::size_t>(da[i] & db[i]);
    uni += static_cast<std::size_t>(da[i] | db[i]);
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace textdct
