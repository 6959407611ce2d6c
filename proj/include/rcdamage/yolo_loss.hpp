#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/geometry.hpp"
#include "rcdamage/yolo_decode.hpp"

namespace rcdamage {

struct GroundTruthBox {
  BoundingBox box;
  int class_id = 0;
};

struct LossWeights {
  double lambda_coord = 5.0;
  double lambda_noobj = 0.5;
};

struct LossBreakdown {
  double coord_xy = 0.0;
  double coord_wh = 0.0;
  double obj_conf = 0.0;
  double noobj_conf = 0.0;
  double class_prob = 0.0;
  double total = 0.0;
};

/// One truth mapped onto the (cell, anchor) slot that must predict it.
struct Responsibility {
  std::size_t truth = 0;
  int row = 0;
  int col = 0;
  int anchor = 0;
};

struct ResponsibilityMap {
  std::vector<Responsibility> assigned;
  std::vector<std::string> warnings;
};

/// Maps each truth to the cell holding its center and to the anchor whose
/// shape best matches it (co-centered IoU, ties to the lower anchor index).
/// When two truths claim the same slot the larger one keeps it (ties: lower
/// truth index); the other is dropped and reported in `warnings`.
inline ResponsibilityMap assign_responsibility(const std::vector<GroundTruthBox> &truths,
                                               const GridGeometry &grid,
                                               const std::vector<AnchorPrior> &anchors) {
  if (anchors.empty())
    throw config_error("responsibility: anchor list is empty");

  std::vector<Responsibility> claims;
  claims.reserve(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const BoundingBox &b = truths[i].box;
    validate(b, "truth " + std::to_string(i));
    const double cx = b.center_x();
    const double cy = b.center_y();
    if (cx < 0.0 || cy < 0.0 || cx > grid.image_w || cy > grid.image_h)
      throw input_error("truth " + std::to_string(i) + ": center (" +
                        std::to_string(cx) + ", " + std::to_string(cy) +
                        ") lies outside the " + std::to_string(grid.image_w) + "x" +
                        std::to_string(grid.image_h) + " image");
    const int col = std::min(static_cast<int>(std::floor(cx / grid.cell_w())), grid.grid_w - 1);
    const int row = std::min(static_cast<int>(std::floor(cy / grid.cell_h())), grid.grid_h - 1);

    int best = 0;
    double best_iou = -1.0;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      const double v = shape_iou(b.width, b.height, anchors[a].width, anchors[a].height);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(a);
      }
    }
    claims.push_back({i, row, col, best});
  }

  ResponsibilityMap out;
  std::vector<bool> dropped(claims.size(), false);
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (dropped[i])
      continue;
    for (std::size_t j = i + 1; j < claims.size(); ++j) {
      if (dropped[j])
        continue;
      const auto &p = claims[i];
      const auto &q = claims[j];
      if (p.row != q.row || p.col != q.col || p.anchor != q.anchor)
        continue;
      const bool j_wins = truths[q.truth].box.area() > truths[p.truth].box.area();
      const std::size_t loser = j_wins ? i : j;
      const std::size_t winner = j_wins ? j : i;
      dropped[loser] = true;
      out.warnings.push_back("truth " + std::to_string(claims[loser].truth) +
                             " dropped: slot (row " + std::to_string(p.row) + ", col " +
                             std::to_string(p.col) + ", anchor " +
                             std::to_string(p.anchor) + ") already taken by truth " +
                             std::to_string(claims[winner].truth));
      if (loser == i)
        break;
    }
  }
  for (std::size_t i = 0; i < claims.size(); ++i)
    if (!dropped[i])
      out.assigned.push_back(claims[i]);
  return out;
}

struct LossEvaluation {
  LossBreakdown breakdown;
  ResponsibilityMap responsibility;
};

/// Evaluates the five-part detection loss for one image.
///
/// Responsible slots contribute the center term (cell-offset units), the size
/// term (square roots of image-normalized width and height), and the object
/// confidence term against the live IoU of prediction and truth. Every other
/// slot contributes the no-object term against a target of 0. The class term
/// compares the responsible slot's softmax to the one-hot truth.
inline LossEvaluation evaluate_loss(const DetectionTensor &tensor,
                                    const std::vector<AnchorPrior> &anchors,
                                    const std::vector<GroundTruthBox> &truths,
                                    const LossWeights &weights = {}) {
  validate(tensor);
  check_anchor_count(tensor, anchors);
  if (!(weights.lambda_coord > 0.0) || !(weights.lambda_noobj >= 0.0))
    throw input_error("loss: lambda_coord must be > 0 and lambda_noobj >= 0");
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].class_id < 0 || truths[i].class_id >= tensor.num_classes)
      throw input_error("truth " + std::to_string(i) + ": class_id " +
                        std::to_string(truths[i].class_id) + " outside tensor's " +
                        std::to_string(tensor.num_classes) + " classes");
  }

  const GridGeometry grid = geometry_of(tensor);
  LossEvaluation ev;
  ev.responsibility = assign_responsibility(truths, grid, anchors);

  std::vector<const Responsibility *> owner(tensor.num_slots(), nullptr);
  for (const auto &r : ev.responsibility.assigned)
    owner[tensor.slot_index(r.row, r.col, r.anchor)] = &r;

  const double img_w = tensor.image_w;
  const double img_h = tensor.image_h;
  LossBreakdown &L = ev.breakdown;
  double xy = 0.0, wh = 0.0, obj = 0.0, noobj = 0.0, cls = 0.0;

  for (int row = 0; row < tensor.grid_h; ++row)
    for (int col = 0; col < tensor.grid_w; ++col)
      for (int a = 0; a < tensor.num_anchors; ++a) {
        const std::size_t s = tensor.slot_index(row, col, a);
        const auto slot = tensor.slot(s);
        const BoundingBox pred =
            decode_cell(slot, col, row, anchors[static_cast<std::size_t>(a)], grid, s);
        const double conf = sigmoid(slot[ch_obj]);
        const Responsibility *r = owner[s];
        if (r == nullptr) {
          noobj += conf * conf;
          continue;
        }
        const GroundTruthBox &gt = truths[r->truth];
        const double tx_hat = gt.box.center_x() / grid.cell_w() - col;
        const double ty_hat = gt.box.center_y() / grid.cell_h() - row;
        const double dx = sigmoid(slot[ch_tx]) - tx_hat;
        const double dy = sigmoid(slot[ch_ty]) - ty_hat;
        xy += dx * dx + dy * dy;

        const double dw = std::sqrt(pred.width / img_w) - std::sqrt(gt.box.width / img_w);
        const double dh = std::sqrt(pred.height / img_h) - std::sqrt(gt.box.height / img_h);
        wh += dw * dw + dh * dh;

        const double dc = conf - iou(pred, gt.box);
        obj += dc * dc;

        const auto probs = softmax(slot.subspan(ch_class0));
        for (std::size_t c = 0; c < probs.size(); ++c) {
          const double target = static_cast<int>(c) == gt.class_id ? 1.0 : 0.0;
          const double d = probs[c] - target;
          cls += d * d;
        }
      }

  L.coord_xy = weights.lambda_coord * xy;
  L.coord_wh = weights.lambda_coord * wh;
  L.obj_conf = obj;
  L.noobj_conf = weights.lambda_noobj * noobj;
  L.class_prob = cls;
  L.total = L.coord_xy + L.coord_wh + L.obj_conf + L.noobj_conf + L.class_prob;
  return ev;
}

inline LossBreakdown compute_loss(const DetectionTensor &tensor,
                                  const std::vector<AnchorPrior> &anchors,
                                  const std::vector<GroundTruthBox> &truths,
                                  const LossWeights &weights = {}) {
  return evaluate_loss(tensor, anchors, truths, weights).breakdown;
}

} // namespace rcdamage
