#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "textdct/dct_codec.hpp"
#include "textdct/geometry.hpp"

namespace textdct {

/// Dense head outputs for one image, laid out as network planes:
/// scores[cell], boxes[ch * cells + cell] for ch in (l, t, r, b), and
/// vectors[i * cells + cell] for i < n.
struct PredictionGrids {
  std::string image_id;
  int image_width = 0;
  int image_height = 0;
  int stride = 8;
  int rows = 0;
  int cols = 0;
  int n = 0;
  std::vector<float> scores;
  std::vector<float> boxes;
  std::vector<float> vectors;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  /// Throws std::invalid_argument when plane sizes disagree with the header.
  void validate() const;
};

struct Detection {
  Box box;
  float score = 0.0f;
  DctMaskVector vector;
  int source_cell = 0;
  int kernel_id = 0;
};

/// Binary mask patch at (x0, y0) on a canvas of canvas_w x canvas_h.
struct PlacedMask {
  int x0 = 0;
  int y0 = 0;
  int canvas_w = 0;
  int canvas_h = 0;
  BinaryMask patch;

  BinaryMask canvas() const;
};

struct FinalDetection {
  PlacedMask mask;
  /// Outer boundary of each 8-connected component, in image pixels.
  std::vector<Polygon> contours;
  float score = 0.0f;
  Box box;
  int kernel_id = 0;
  int source_cell = 0;
};

enum class Connectivity { kFour = 4, kEight = 8 };

struct Candidates {
  std::vector<Detection> detections;
  /// Component id per cell (-1 below threshold).
  std::vector<int> labels;
  int components = 0;
};

enum class NmsVariant { kSegmented, kStandard, kKernel };

NmsVariant parse_nms_variant(const std::string& name);
std::string to_string(NmsVariant v);

/// Connected-component labeling of a binary grid; ids follow row-major
/// order of each component's first cell.
std::vector<int> label_components(std::span<const std::uint8_t> grid, int rows,
                                  int cols, Connectivity conn, int& count);

/// Cells with score >= tau_a, grouped into kernel components. `k` is the
/// spectrum size the predicted vectors belong to.
Candidates extract_candidates(const PredictionGrids& grids, double tau_a,
                              int k, Connectivity conn = Connectivity::kEight);

/// Score-descending greedy suppression at IoU >= iou_threshold. Ties are
/// broken by the smaller source cell. Returns kept indices in keep order.
std::vector<std::size_t> nms_indices(std::span<const Detection> dets,
                                     double iou_threshold);
/// One detection per kernel (argmax score, then smaller cell) followed by
/// standard NMS.
std::vector<std::size_t> s_nms_indices(std::span<const Detection> dets,
                                       double iou_threshold);
/// NMS inside each kernel, then NMS over the survivors.
std::vector<std::size_t> k_nms_indices(std::span<const Detection> dets,
                                       double iou_threshold);

std::vector<Detection> standard_nms(std::span<const Detection> dets,
                                    double iou_threshold);
std::vector<Detection> s_nms(std::span<const Detection> dets,
                             double iou_threshold);
std::vector<Detection> k_nms(std::span<const Detection> dets,
                             double iou_threshold);
std::vector<Detection> apply_nms(std::span<const Detection> dets,
                                 NmsVariant variant, double iou_threshold);

/// Outer crack boundaries of the 8-connected foreground components, with
/// pixel (r, c) occupying [c, c+1) x [r, r+1) shifted by (x0, y0).
std::vector<Polygon> trace_contours(const BinaryMask& mask, double x0 = 0.0,
                                    double y0 = 0.0);

struct DecodeResult {
  std::vector<FinalDetection> detections;
  /// Detections whose mask was empty after binarization or clipping.
  int dropped = 0;
};

/// Decodes each vector, resizes it bilinearly to the detection's pixel box,
/// binarizes at tau_b and places it on the canvas.
DecodeResult decode_detections(std::span<const Detection> dets, double tau_b,
                               int canvas_w, int canvas_h);

struct PostprocessConfig {
  int k = 64;
  double tau_a = 0.9;
  double tau_b = 0.35;
  double nms_iou = 0.5;
  NmsVariant variant = NmsVariant::kSegmented;
  Connectivity connectivity = Connectivity::kEight;
};

struct PostprocessResult {
  std::string image_id;
  std::vector<FinalDetection> detections;
  int candidates = 0;
  int components = 0;
  int after_nms = 0;
  int dropped = 0;
  double elapsed_ms = 0.0;
};

/// Threshold, group, suppress, decode.
PostprocessResult run_postprocess(const PredictionGrids& grids,
                                  const PostprocessConfig& config);

}  // namespace textdct
