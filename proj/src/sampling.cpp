#include "textdct/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace textdct {

namespace {

struct Claim {
  int instance = -1;
  double area = std::numeric_limits<double>::infinity();
  int count = 0;
};

LabelGrid empty_grid(int width, int height, int stride) {
  if (stride <= 0) throw GeometryError("labels: stride must be positive");
  if (width <= 0 || height <= 0) {
    throw GeometryError("labels: image dimensions must be positive");
  }
  LabelGrid g;
  g.stride = stride;
  g.rows = (height + stride - 1) / stride;
  g.cols = (width + stride - 1) / stride;
  g.kernel.assign(g.cell_count(), 0);
  g.ignore.assign(g.cell_count(), 0);
  g.box_target.assign(g.cell_count(), {0.f, 0.f, 0.f, 0.f});
  g.assignment.assign(g.cell_count(), -1);
  return g;
}

void claim(std::vector<Claim>& claims, std::size_t cell, int instance,
           double area) {
  Claim& c = claims[cell];
  ++c.count;
  if (area < c.area || (area == c.area && instance < c.instance)) {
    c.area = area;
    c.instance = instance;
  }
}

std::size_t cell_at(const LabelGrid& g, Point p) {
  const int c = std::clamp(static_cast<int>(std::floor(p.x / g.stride)), 0,
                           g.cols - 1);
  const int r = std::clamp(static_cast<int>(std::floor(p.y / g.stride)), 0,
                           g.rows - 1);
  return static_cast<std::size_t>(r) * g.cols + c;
}

// Cell centers inside `region`, scanning only its bounding box.
std::vector<std::size_t> cells_inside(const LabelGrid& g,
                                      const Polygon& region) {
  std::vector<std::size_t> out;
  const Box b = bounding_box(region);
  const double s = g.stride;
  const int c0 = std::max(0, static_cast<int>(std::floor(b.x_min / s - 0.5)));
  const int c1 = std::min(g.cols - 1, static_cast<int>(std::ceil(b.x_max / s)));
  const int r0 = std::max(0, static_cast<int>(std::floor(b.y_min / s - 0.5)));
  const int r1 = std::min(g.rows - 1, static_cast<int>(std::ceil(b.y_max / s)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (contains(region, {(c + 0.5) * s, (r + 0.5) * s})) {
        out.push_back(static_cast<std::size_t>(r) * g.cols + c);
      }
    }
  }
  return out;
}

void mark_ignored(LabelGrid& g, const std::vector<TextInstance>& instances,
                  const std::vector<Polygon>& clipped) {
  for (std::size_t j = 0; j < instances.size(); ++j) {
    if (!instances[j].ignore || !clipped[j].valid()) continue;
    for (std::size_t cell : cells_inside(g, clipped[j])) g.ignore[cell] = 1;
  }
}

void finalize(LabelGrid& g, const std::vector<Claim>& claims,
              const std::vector<Polygon>& clipped) {
  for (std::size_t cell = 0; cell < claims.size(); ++cell) {
    const Claim& c = claims[cell];
    if (c.instance < 0) continue;
    if (c.count > 1) ++g.conflicts;
    g.kernel[cell] = 1;
    g.ignore[cell] = 0;
    g.assignment[cell] = c.instance;
    const Box b = bounding_box(clipped[c.instance]);
    const Point p = g.cell_center(cell);
    g.box_target[cell] = {static_cast<float>(p.x - b.x_min),
                          static_cast<float>(p.y - b.y_min),
                          static_cast<float>(b.x_max - p.x),
                          static_cast<float>(b.y_max - p.y)};
  }
}

std::vector<Polygon> clip_all(const std::vector<TextInstance>& instances,
                              int width, int height) {
  std::vector<Polygon> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    out.push_back(clip_to_image(inst.polygon, width, height));
  }
  return out;
}

}  // namespace

int LabelGrid::positives() const {
  return static_cast<int>(std::count(kernel.begin(), kernel.end(), 1));
}

Point LabelGrid::cell_center(std::size_t cell) const {
  const auto r = static_cast<int>(cell / cols);
  const auto c = static_cast<int>(cell % cols);
  return {(c + 0.5) * stride, (r + 0.5) * stride};
}

Polygon clip_to_image(const Polygon& poly, int width, int height) {
  std::vector<Point> pts = poly.vertices();
  for (auto& p : pts) {
    p.x = std::clamp(p.x, 0.0, static_cast<double>(width));
    p.y = std::clamp(p.y, 0.0, static_cast<double>(height));
  }
  return Polygon(std::move(pts));
}

LabelGrid generate_labels(const std::vector<TextInstance>& instances,
                          int image_width, int image_height,
                          const LabelParams& params) {
  if (!(params.shrink_rate > 0.0 && params.shrink_rate <= 1.0)) {
    throw GeometryError("labels: shrink rate must lie in (0, 1]");
  }
  LabelGrid g = empty_grid(image_width, image_height, params.stride);
  const std::vector<Polygon> clipped =
      clip_all(instances, image_width, image_height);
  mark_ignored(g, instances, clipped);

  std::vector<Claim> claims(g.cell_count());
  g.vector_table.resize(instances.size());
  for (std::size_t j = 0; j < instances.size(); ++j) {
    g.vector_table[j].k = params.k;
    if (instances[j].ignore || !clipped[j].valid()) continue;
    const Polygon& poly = clipped[j];
    g.vector_table[j] = encode(poly, params.k, params.n);

    std::optional<Polygon> kernel;
    try {
      kernel = shrink_polygon(poly, params.shrink_rate);
    } catch (const EmptyKernelError&) {
    }

    std::vector<std::size_t> cells;
    if (kernel) cells = cells_inside(g, *kernel);
    const double area = kernel ? kernel->area() : 0.0;
    if (cells.empty()) {
      ++g.fallback_instances;
      if (!params.fallback_single_cell) continue;
      cells.push_back(cell_at(g, kernel ? kernel->centroid() : poly.centroid()));
    }
    for (std::size_t cell : cells) claim(claims, cell, static_cast<int>(j), area);
  }
  finalize(g, claims, clipped);
  return g;
}

LabelGrid generate_labels_center_sampling(
    const std::vector<TextInstance>& instances, int image_width,
    int image_height, const LabelParams& params, int radius_cells) {
  if (radius_cells < 0) {
    throw GeometryError("labels: center-sampling radius must be >= 0");
  }
  LabelGrid g = empty_grid(image_width, image_height, params.stride);
  const std::vector<Polygon> clipped =
      clip_all(instances, image_width, image_height);
  mark_ignored(g, instances, clipped);

  std::vector<Claim> claims(g.cell_count());
  g.vector_table.resize(instances.size());
  for (std::size_t j = 0; j < instances.size(); ++j) {
    g.vector_table[j].k = params.k;
    if (instances[j].ignore || !clipped[j].valid()) continue;
    const Polygon& poly = clipped[j];
    g.vector_table[j] = encode(poly, params.k, params.n);
    const std::size_t center = cell_at(g, poly.centroid());
    const int cr = static_cast<int>(center / g.cols);
    const int cc = static_cast<int>(center % g.cols);
    for (int r = std::max(0, cr - radius_cells);
         r <= std::min(g.rows - 1, cr + radius_cells); ++r) {
      for (int c = std::max(0, cc - radius_cells);
           c <= std::min(g.cols - 1, cc + radius_cells); ++c) {
        claim(claims, static_cast<std::size_t>(r) * g.cols + c,
              static_cast<int>(j), poly.area());
      }
    }
  }
  finalize(g, claims, clipped);
  return g;
}

}  // namespace textdct
