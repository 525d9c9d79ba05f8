#include "textdct/postprocess.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace textdct {

namespace {

// True when detection a ranks before b: higher score, then smaller cell.
bool ranks_before(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.source_cell < b.source_cell;
}

std::vector<std::size_t> nms_subset(std::span<const Detection> dets,
                                    std::vector<std::size_t> idx,
                                    double iou_threshold) {
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(dets[a], dets[b]);
  });
  std::vector<std::size_t> keep;
  for (std::size_t i : idx) {
    bool suppressed = false;
    for (std::size_t j : keep) {
      if (box_iou(dets[i].box, dets[j].box) >= iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) keep.push_back(i);
  }
  return keep;
}

std::vector<Detection> gather(std::span<const Detection> dets,
                              const std::vector<std::size_t>& idx) {
  std::vector<Detection> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(dets[i]);
  return out;
}

}  // namespace

void PredictionGrids::validate() const {
  if (stride <= 0 || rows < 0 || cols < 0 || n < 0) {
    throw std::invalid_argument("prediction grids: bad header values");
  }
  const std::size_t cells = cell_count();
  if (scores.size() != cells || boxes.size() != 4 * cells ||
      vectors.size() != static_cast<std::size_t>(n) * cells) {
    throw std::invalid_argument(
        "prediction grids: plane sizes do not match the header");
  }
}

BinaryMask PlacedMask::canvas() const {
  BinaryMask out(canvas_w, canvas_h);
  for (int r = 0; r < patch.height(); ++r) {
    const int y = y0 + r;
    if (y < 0 || y >= canvas_h) continue;
    for (int c = 0; c < patch.width(); ++c) {
      const int x = x0 + c;
      if (x < 0 || x >= canvas_w) continue;
      if (patch.at(r, c)) out.set(y, x, 1);
    }
  }
  return out;
}

NmsVariant parse_nms_variant(const std::string& name) {
  if (name == "s-nms") return NmsVariant::kSegmented;
  if (name == "nms") return NmsVariant::kStandard;
  if (name == "k-nms") return NmsVariant::kKernel;
  throw std::invalid_argument("unknown NMS variant '" + name +
                              "' (expected s-nms, nms or k-nms)");
}

std::string to_string(NmsVariant v) {
  switch (v) {
    case NmsVariant::kSegmented:
      return "s-nms";
    case NmsVariant::kStandard:
      return "nms";
    case NmsVariant::kKernel:
      return "k-nms";
  }
  return "s-nms";
}

std::vector<int> label_components(std::span<const std::uint8_t> grid, int rows,
                                  int cols, Connectivity conn, int& count) {
  std::vector<int> labels(grid.size(), -1);
  count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (!grid[seed] || labels[seed] >= 0) continue;
    const int id = count++;
    labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(cell / cols);
      const int c = static_cast<int>(cell % cols);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (conn == Connectivity::kFour && dr != 0 && dc != 0) continue;
          const int nr = r + dr;
          const int nc = c + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const std::size_t next = static_cast<std::size_t>(nr) * cols + nc;
          if (grid[next] && labels[next] < 0) {
            labels[next] = id;
            stack.push_back(next);
          }
        }
      }
    }
  }
  return labels;
}

Candidates extract_candidates(const PredictionGrids& grids, double tau_a,
                              int k, Connectivity conn) {
  grids.validate();
  if (grids.n > k * k) {
    throw std::invalid_argument("extract_candidates: n exceeds k*k");
  }
  const std::size_t cells = grids.cell_count();
  std::vector<std::uint8_t> positive(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) positive[i] = grids.scores[i] >= tau_a;

  Candidates out;
  out.labels = label_components(positive, grids.rows, grids.cols, conn,
                                out.components);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (!positive[cell]) continue;
    const double cx = (static_cast<double>(cell % grids.cols) + 0.5) * grids.stride;
    const double cy = (static_cast<double>(cell / grids.cols) + 0.5) * grids.stride;
    Detection d;
    d.box = {cx - grids.boxes[cell], cy - grids.boxes[cells + cell],
             cx + grids.boxes[2 * cells + cell],
             cy + grids.boxes[3 * cells + cell]};
    d.score = grids.scores[cell];
    d.vector.k = k;
    d.vector.coeffs.resize(grids.n);
    for (int i = 0; i < grids.n; ++i) {
      d.vector.coeffs[i] = grids.vectors[static_cast<std::size_t>(i) * cells + cell];
    }
    d.source_cell = static_cast<int>(cell);
    d.kernel_id = out.labels[cell];
    out.detections.push_back(std::move(d));
  }
  return out;
}

std::vector<std::size_t> nms_indices(std::span<const Detection> dets,
                                     double iou_threshold) {
  std::vector<std::size_t> idx(dets.size());
  std::iota(idx.begin(), idx.end(), 0);
  return nms_subset(dets, std::move(idx), iou_threshold);
}

std::vector<std::size_t> s_nms_indices(std::span<const Detection> dets,
                                       double iou_threshold) {
  std::map<int, std::size_t> best;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    auto [it, inserted] = best.try_emplace(dets[i].kernel_id, i);
    if (!inserted && ranks_before(dets[i], dets[it->second])) it->second = i;
  }
  std::vector<std::size_t> survivors;
  survivors.reserve(best.size());
  for (const auto& [kernel, i] : best) survivors.push_back(i);
  return nms_subset(dets, std::move(survivors), iou_threshold);
}

std::vector<std::size_t> k_nms_indices(std::span<const Detection> dets,
                                       double iou_threshold) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    groups[dets[i].kernel_id].push_back(i);
  }
  std::vector<std::size_t> survivors;
  for (auto& [kernel, members] : groups) {
    auto kept = nms_subset(dets, std::move(members), iou_threshold);
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  }
  return nms_subset(dets, std::move(survivors), iou_threshold);
}

std::vector<Detection> standard_nms(std::span<const Detection> dets,
                                    double iou_threshold) {
  return gather(dets, nms_indices(dets, iou_threshold));
}

std::vector<Detection> s_nms(std::span<const Detection> dets,
                             double iou_threshold) {
  return gather(dets, s_nms_indices(dets, iou_threshold));
}

std::vector<Detection> k_nms(std::span<const Detection> dets,
                             double iou_threshold) {
  return gather(dets, k_nms_indices(dets, iou_threshold));
}

std::vector<Detection> apply_nms(std::span<const Detection> dets,
                                 NmsVariant variant, double iou_threshold) {
  switch (variant) {
    case NmsVariant::kStandard:
      return standard_nms(dets, iou_threshold);
    case NmsVariant::kKernel:
      return k_nms(dets, iou_threshold);
    case NmsVariant::kSegmented:
      break;
  }
  return s_nms(dets, iou_threshold);
}

std::vector<Polygon> trace_contours(const BinaryMask& mask, double x0,
                                    double y0) {
  const int w = mask.width();
  const int h = mask.height();
  auto fg = [&](int r, int c) {
    return r >= 0 && r < h && c >= 0 && c < w && mask.at(r, c) != 0;
  };
  int count = 0;
  const std::vector<int> labels =
      label_components(mask.data(), h, w, Connectivity::kEight, count);

  // Headings in y-down pixel space: east, south, west, north.
  constexpr std::array<int, 4> kDx{1, 0, -1, 0};
  constexpr std::array<int, 4> kDy{0, 1, 0, -1};

  std::vector<Polygon> out;
  std::vector<bool> seen(static_cast<std::size_t>(count), false);
  for (std::size_t cell = 0; cell < labels.size(); ++cell) {
    const int id = labels[cell];
    if (id < 0 || seen[id]) continue;
    seen[id] = true;

    // Walk the cracks with foreground on the right, starting along the top
    // edge of the component's first pixel.
    const int sx = static_cast<int>(cell % w);
    const int sy = static_cast<int>(cell / w);
    int x = sx;
    int y = sy;
    int dir = 0;
    std::vector<Point> pts;
    pts.push_back({x0 + x, y0 + y});
    for (bool first = true;; first = false) {
      const int right = (dir + 1) % 4;
      const int left = (dir + 3) % 4;
      // Pixel centers ahead of the corner, on either side of the heading.
      const auto pixel = [&](int side) {
        const double px = x + 0.5 * kDx[dir] + 0.5 * kDx[side];
        const double py = y + 0.5 * kDy[dir] + 0.5 * kDy[side];
        return std::array<int, 2>{static_cast<int>(std::floor(py)),
                                  static_cast<int>(std::floor(px))};
      };
      const auto ahead_left = pixel(left);
      const auto ahead_right = pixel(right);
      int next = dir;
      if (fg(ahead_left[0], ahead_left[1])) {
        next = left;
      } else if (!fg(ahead_right[0], ahead_right[1])) {
        next = right;
      }
      // Back on the first edge: the loop is closed.
      if (!first && x == sx && y == sy && next == 0) break;
      if (next != dir) {
        pts.push_back({x0 + x, y0 + y});
        dir = next;
      }
      x += kDx[dir];
      y += kDy[dir];
    }
    out.emplace_back(std::move(pts));
  }
  return out;
}

DecodeResult decode_detections(std::span<const Detection> dets, double tau_b,
                               int canvas_w, int canvas_h) {
  DecodeResult out;
  for (const auto& det : dets) {
    const int bx0 = static_cast<int>(std::lround(det.box.x_min));
    const int by0 = static_cast<int>(std::lround(det.box.y_min));
    const int bx1 = static_cast<int>(std::lround(det.box.x_max));
    const int by1 = static_cast<int>(std::lround(det.box.y_max));
    const int bw = bx1 - bx0;
    const int bh = by1 - by0;
    const int cx0 = std::max(bx0, 0);
    const int cy0 = std::max(by0, 0);
    const int cx1 = std::min(bx1, canvas_w);
    const int cy1 = std::min(by1, canvas_h);
    if (bw <= 0 || bh <= 0 || cx1 <= cx0 || cy1 <= cy0 || det.vector.k <= 0) {
      ++out.dropped;
      continue;
    }
    const std::vector<double> resized =
        resize_bilinear(decode(det.vector), bw, bh);

    FinalDetection fd;
    fd.mask = {cx0, cy0, canvas_w, canvas_h, BinaryMask(cx1 - cx0, cy1 - cy0)};
    for (int y = cy0; y < cy1; ++y) {
      for (int x = cx0; x < cx1; ++x) {
        const double v =
            resized[static_cast<std::size_t>(y - by0) * bw + (x - bx0)];
        if (v >= tau_b) fd.mask.patch.set(y - cy0, x - cx0, 1);
      }
    }
    if (fd.mask.patch.count() == 0) {
      ++out.dropped;
      continue;
    }
    fd.contours = trace_contours(fd.mask.patch, cx0, cy0);
    fd.score = det.score;
    fd.box = det.box;
    fd.kernel_id = det.kernel_id;
    fd.source_cell = det.source_cell;
    out.detections.push_back(std::move(fd));
  }
  return out;
}

PostprocessResult run_postprocess(const PredictionGrids& grids,
                                  const PostprocessConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  PostprocessResult out;
  out.image_id = grids.image_id;
  const Candidates cand =
      extract_candidates(grids, config.tau_a, config.k, config.connectivity);
  out.candidates = static_cast<int>(cand.detections.size());
  out.components = cand.components;
  const std::vector<Detection> kept =
      apply_nms(cand.detections, config.variant, config.nms_iou);
  out.after_nms = static_cast<int>(kept.size());
  DecodeResult decoded = decode_detections(kept, config.tau_b,
                                           grids.image_width, grids.image_height);
  out.detections = std::move(decoded.detections);
  out.dropped = decoded.dropped;
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

}  // namespace textdct
