#include "textdct/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textdct {

DiceResult dice_loss(std::span<const float> pred, std::span<const float> gt,
                     std::span<const std::uint8_t> valid) {
  if (pred.size() != gt.size() || (!valid.empty() && valid.size() != gt.size())) {
    throw std::invalid_argument("dice_loss: input sizes differ");
  }
  double inter = 0.0;
  double sum_p = 0.0;
  double sum_g = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!valid.empty() && !valid[i]) continue;
    inter += static_cast<double>(pred[i]) * gt[i];
    sum_p += pred[i];
    sum_g += gt[i];
  }
  if (sum_p + sum_g == 0.0) return {0.0, true};
  return {1.0 - 2.0 * inter / (sum_p + sum_g), false};
}

GiouResult giou_loss(const Box& a, const Box& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  const double enclosing =
      (std::max(a.x_max, b.x_max) - std::min(a.x_min, b.x_min)) *
      (std::max(a.y_max, b.y_max) - std::min(a.y_min, b.y_min));
  GiouResult out;
  out.degenerate = !(uni > 0.0);
  const double iou = out.degenerate ? 0.0 : inter / uni;
  const double penalty = enclosing > 0.0 ? (enclosing - uni) / enclosing : 0.0;
  out.loss = 1.0 - iou + penalty;
  return out;
}

double smooth_l1(double x, double beta) {
  const double ax = std::abs(x);
  return ax < beta ? 0.5 * x * x / beta : ax - 0.5 * beta;
}

double smooth_l1_grad(double x, double beta) {
  if (std::abs(x) < beta) return x / beta;
  return x > 0.0 ? 1.0 : -1.0;
}

double mask_vector_loss(std::span<const float> pred, std::span<const float> gt,
                        bool is_text, double beta) {
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("mask_vector_loss: vector lengths differ");
  }
  if (!is_text) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    acc += smooth_l1(static_cast<double>(pred[i]) - gt[i], beta);
  }
  return acc;
}

LossBreakdown total_loss(double l_cls, double l_box, double l_mask,
                         double lambda_box, double lambda_mask) {
  LossBreakdown out{l_cls, l_box, l_mask, lambda_box, lambda_mask, 0.0};
  out.total = l_cls + lambda_box * l_box + lambda_mask * l_mask;
  return out;
}

}  // namespace textdct
