#include "textdct/dct_codec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace textdct {

namespace {

// basis[u * k + x] = sqrt(2/K) C(u) cos((2x + 1) u pi / 2K). The 2D transform
// is basis * M * basis^T, which carries the (2/K) C(u) C(v) factor.
const std::vector<double>& dct_basis(int k) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[k];
  if (!slot) {
    auto basis = std::make_unique<std::vector<double>>(
        static_cast<std::size_t>(k) * k);
    const double scale = std::sqrt(2.0 / k);
    for (int u = 0; u < k; ++u) {
      for (int x = 0; x < k; ++x) {
        (*basis)[static_cast<std::size_t>(u) * k + x] =
            scale * dct_norm(u) *
            std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * k));
      }
    }
    slot = std::move(basis);
  }
  return *slot;
}

// out = A * B for k x k row-major matrices; `a_transposed` reads A^T.
void matmul(std::span<const double> a, std::span<const double> b,
            std::span<double> out, int k, bool a_transposed) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < k; ++i) {
    double* out_row = out.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = a_transposed ? a[static_cast<std::size_t>(p) * k + i]
                                      : a[static_cast<std::size_t>(i) * k + p];
      if (aip == 0.0) continue;
      const double* b_row = b.data() + static_cast<std::size_t>(p) * k;
      for (int j = 0; j < k; ++j) out_row[j] += aip * b_row[j];
    }
  }
}

// out = A * B^T
void matmul_bt(std::span<const double> a, std::span<const double> b,
               std::span<double> out, int k, bool a_transposed) {
  std::vector<double> bt(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      bt[static_cast<std::size_t>(j) * k + i] =
          b[static_cast<std::size_t>(i) * k + j];
    }
  }
  matmul(a, bt, out, k, a_transposed);
}

}  // namespace

double dct_norm(int w) { return w == 0 ? 1.0 / std::numbers::sqrt2 : 1.0; }

Spectrum dct2(const MaskGrid& mask) {
  const int k = mask.k();
  const auto& basis = dct_basis(k);
  std::vector<double> tmp(static_cast<std::size_t>(k) * k);
  // tmp = M * B^T (transform along columns, index y -> v)
  matmul_bt(mask.values(), basis, tmp, k, false);
  Spectrum out(k);
  // out = B * tmp (transform along rows, index x -> u)
  matmul(basis, tmp, out.values(), k, false);
  return out;
}

MaskGrid idct2(const Spectrum& spectrum) {
  const int k = spectrum.k();
  const auto& basis = dct_basis(k);
  std::vector<double> tmp(static_cast<std::size_t>(k) * k);
  // tmp = S * B
  matmul(spectrum.values(), basis, tmp, k, false);
  MaskGrid out(k);
  // out = B^T * tmp
  matmul(basis, tmp, out.values(), k, true);
  return out;
}

const std::vector<FreqIndex>& zigzag_order(int k) {
  if (k <= 0) throw CodecError("zigzag_order: k must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<FreqIndex>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[k];
  if (!slot) {
    auto order = std::make_unique<std::vector<FreqIndex>>();
    order->reserve(static_cast<std::size_t>(k) * k);
    for (int d = 0; d <= 2 * (k - 1); ++d) {
      const int u_lo = std::max(0, d - (k - 1));
      const int u_hi = std::min(d, k - 1);
      if (d % 2 == 0) {
        for (int u = u_hi; u >= u_lo; --u) order->push_back({u, d - u});
      } else {
        for (int u = u_lo; u <= u_hi; ++u) order->push_back({u, d - u});
      }
    }
    slot = std::move(order);
  }
  return *slot;
}

MaskGrid canonical_from_mask(const BinaryMask& mask, int k) {
  MaskGrid grid(k);
  if (mask.empty()) return grid;
  const double sy = static_cast<double>(mask.height()) / k;
  const double sx = static_cast<double>(mask.width()) / k;
  for (int r = 0; r < k; ++r) {
    const int src_r = std::min(mask.height() - 1,
                               static_cast<int>(std::floor((r + 0.5) * sy)));
    for (int c = 0; c < k; ++c) {
      const int src_c = std::min(mask.width() - 1,
                                 static_cast<int>(std::floor((c + 0.5) * sx)));
      grid.at(r, c) = mask.at(src_r, src_c);
    }
  }
  return grid;
}

MaskGrid canonical_from_polygon(const Polygon& poly, int k) {
  MaskGrid grid(k);
  const Box box = bounding_box(poly);
  const BinaryMask m =
      rasterize_in_frame(std::span<const Polygon>(&poly, 1), box, k, k);
  auto dst = grid.values();
  auto src = m.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i];
  return grid;
}

DctMaskVector encode(const MaskGrid& mask, int n) {
  const int k = mask.k();
  if (n < 1 || n > k * k) {
    throw CodecError("encode: n must lie in [1, k*k]");
  }
  bool empty = true;
  for (double v : mask.values()) {
    if (v != 0.0) {
      empty = false;
      break;
    }
  }
  DctMaskVector out;
  out.k = k;
  out.coeffs.assign(n, 0.0);
  out.from_empty_mask = empty;
  if (empty) return out;
  const Spectrum spec = dct2(mask);
  const auto& order = zigzag_order(k);
  for (int i = 0; i < n; ++i) out.coeffs[i] = spec.at(order[i].u, order[i].v);
  return out;
}

DctMaskVector encode(const BinaryMask& mask, int k, int n) {
  return encode(canonical_from_mask(mask, k), n);
}

DctMaskVector encode(const Polygon& poly, int k, int n) {
  return encode(canonical_from_polygon(poly, k), n);
}

MaskGrid decode(const DctMaskVector& vec) {
  const int k = vec.k;
  if (k <= 0 || vec.n() > k * k) {
    throw CodecError("decode: vector does not fit a k*k spectrum");
  }
  Spectrum spec(k);
  const auto& order = zigzag_order(k);
  for (int i = 0; i < vec.n(); ++i) {
    spec.at(order[i].u, order[i].v) = vec.coeffs[i];
  }
  return idct2(spec);
}

BinaryMask binarize(const MaskGrid& grid, double threshold) {
  const int k = grid.k();
  BinaryMask out(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) out.set(r, c, grid.at(r, c) >= threshold);
  }
  return out;
}

double sample_bilinear(const MaskGrid& grid, double x, double y) {
  const int k = grid.k();
  const double fx = std::clamp(x - 0.5, 0.0, double(k - 1));
  const double fy = std::clamp(y - 0.5, 0.0, double(k - 1));
  const int c0 = static_cast<int>(std::floor(fx));
  const int r0 = static_cast<int>(std::floor(fy));
  const int c1 = std::min(c0 + 1, k - 1);
  const int r1 = std::min(r0 + 1, k - 1);
  const double ax = fx - c0;
  const double ay = fy - r0;
  const double top = grid.at(r0, c0) * (1.0 - ax) + grid.at(r0, c1) * ax;
  const double bottom = grid.at(r1, c0) * (1.0 - ax) + grid.at(r1, c1) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

std::vector<double> resize_bilinear(const MaskGrid& grid, int width,
                                    int height) {
  if (width <= 0 || height <= 0) {
    throw CodecError("resize_bilinear: target size must be positive");
  }
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  const double sx = static_cast<double>(grid.k()) / width;
  const double sy = static_cast<double>(grid.k()) / height;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      out[static_cast<std::size_t>(r) * width + c] =
          sample_bilinear(grid, (c + 0.5) * sx, (r + 0.5) * sy);
    }
  }
  return out;
}

double reconstruction_iou(const Polygon& poly, int k, int n,
                          double threshold) {
  const MaskGrid gt = canonical_from_polygon(poly, k);
  const BinaryMask gt_mask = binarize(gt, 0.5);
  if (gt_mask.count() == 0) return 0.0;
  const BinaryMask rec = binarize(decode(encode(gt, n)), threshold);
  return mask_iou(rec, gt_mask);
}

}  // namespace textdct
