#pragma once

#include <cstdint>
#include <span>

#include "textdct/geometry.hpp"

namespace textdct {

struct DiceResult {
  double loss = 0.0;
  /// Both prediction and target summed to zero; loss is reported as 0.
  bool empty = false;
};

/// 1 - 2 sum(p g) / (sum p + sum g) over the cells where `valid` is nonzero
/// (all cells when `valid` is empty).
DiceResult dice_loss(std::span<const float> pred, std::span<const float> gt,
                     std::span<const std::uint8_t> valid = {});

struct GiouResult {
  double loss = 0.0;
  /// The union had zero area, so IoU was taken as 0.
  bool degenerate = false;
};

/// 1 - IoU + |C \ (A u B)| / |C| with C the smallest box enclosing both.
GiouResult giou_loss(const Box& a, const Box& b);

/// 0.5 x^2 / beta for |x| < beta, |x| - 0.5 beta otherwise.
double smooth_l1(double x, double beta = 1.0);
double smooth_l1_grad(double x, double beta = 1.0);

/// Sum of smooth-L1 over elementwise differences; 0 when `is_text` is false.
/// Throws std::invalid_argument on length mismatch.
double mask_vector_loss(std::span<const float> pred, std::span<const float> gt,
                        bool is_text, double beta = 1.0);

struct LossBreakdown {
  double l_cls = 0.0;
  double l_box = 0.0;
  double l_mask = 0.0;
  double lambda_box = 1.0;
  double lambda_mask = 1.0;
  double total = 0.0;
};

LossBreakdown total_loss(double l_cls, double l_box, double l_mask,
                         double lambda_box = 1.0, double lambda_mask = 1.0);

}  // namespace textdct
