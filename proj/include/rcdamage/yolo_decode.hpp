#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/geometry.hpp"

namespace rcdamage {

/// Per-anchor channel layout: [t_x, t_y, t_w, t_h, t_0, class logits...].
enum channel : std::size_t { ch_tx = 0, ch_ty, ch_tw, ch_th, ch_obj, ch_class0 };

struct AnchorPrior {
  double width = 0.0;
  double height = 0.0;

  double area() const { return width * height; }
  bool operator==(const AnchorPrior &) const = default;
};

inline void validate(const AnchorPrior &a, const std::string &where = "anchor") {
  if (!(a.width > 0.0) || !std::isfinite(a.width) || !(a.height > 0.0) ||
      !std::isfinite(a.height))
    throw input_error(where + ": width and height must be finite and > 0");
}

/// The ten (width, height) priors, in pixels, clustered from the exposed
/// rebar training set of the column damage detector (416x416 input, S=26).
inline std::vector<AnchorPrior> column_rebar_anchors() {
  return {{104, 98},  {174, 309}, {174, 132}, {107, 285}, {105, 167},
          {67, 206},  {274, 338}, {208, 213}, {138, 199}, {54, 77}};
}

/// Raw, unactivated network output of shape grid_h x grid_w x anchors x
/// (5 + classes), flattened row-major in exactly that order.
struct DetectionTensor {
  int grid_h = 0;
  int grid_w = 0;
  int num_anchors = 0;
  int num_classes = 0;
  int image_w = 0;
  int image_h = 0;
  std::vector<double> values;

  std::size_t slot_size() const { return 5 + static_cast<std::size_t>(num_classes); }
  std::size_t num_slots() const {
    return static_cast<std::size_t>(grid_h) * static_cast<std::size_t>(grid_w) *
           static_cast<std::size_t>(num_anchors);
  }
  std::size_t expected_size() const { return num_slots() * slot_size(); }

  std::size_t slot_index(int row, int col, int anchor) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_w) +
            static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(num_anchors) +
           static_cast<std::size_t>(anchor);
  }
  std::size_t value_index(int row, int col, int anchor, std::size_t ch) const {
    return slot_index(row, col, anchor) * slot_size() + ch;
  }
  std::span<const double> slot(std::size_t s) const {
    return std::span<const double>(values).subspan(s * slot_size(), slot_size());
  }
  std::span<double> slot(std::size_t s) {
    return std::span<double>(values).subspan(s * slot_size(), slot_size());
  }
};

inline DetectionTensor make_tensor(int grid_h, int grid_w, int num_anchors,
                                   int num_classes, int image_w, int image_h,
                                   double fill = 0.0) {
  DetectionTensor t{grid_h, grid_w, num_anchors, num_classes, image_w, image_h, {}};
  if (grid_h < 1 || grid_w < 1 || num_anchors < 1 || num_classes < 1)
    throw input_error("tensor: grid, anchor and class counts must be >= 1");
  t.values.assign(t.expected_size(), fill);
  return t;
}

inline void validate(const DetectionTensor &t) {
  if (t.grid_h < 1 || t.grid_w < 1 || t.num_anchors < 1 || t.num_classes < 1)
    throw input_error("tensor: grid_h, grid_w, num_anchors and num_classes must be >= 1");
  if (t.image_w < 1 || t.image_h < 1)
    throw input_error("tensor: image_w and image_h must be >= 1");
  if (t.values.size() != t.expected_size())
    throw input_error("tensor: expected " + std::to_string(t.expected_size()) +
                      " values, got " + std::to_string(t.values.size()));
}

struct DecodeConfig {
  std::vector<AnchorPrior> anchors;
  double score_threshold = 0.5;
  double nms_iou = 0.5;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty())
    return p;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    sum += p[i];
  }
  for (double &v : p)
    v /= sum;
  return p;
}

struct GridGeometry {
  int grid_w = 0;
  int grid_h = 0;
  int image_w = 0;
  int image_h = 0;

  double cell_w() const { return static_cast<double>(image_w) / grid_w; }
  double cell_h() const { return static_cast<double>(image_h) / grid_h; }
};

inline GridGeometry geometry_of(const DetectionTensor &t) {
  return {t.grid_w, t.grid_h, t.image_w, t.image_h};
}

/// Decodes one anchor slot `slot` (5 + C values) predicted at grid cell
/// (col, row) into a scored corner-form box in image pixels.
///
///   center_x = (sigmoid(t_x) + col) * W / S_w
///   center_y = (sigmoid(t_y) + row) * H / S_h
///   width    = anchor.width  * exp(t_w)
///   height   = anchor.height * exp(t_h)
///   score    = sigmoid(t_0) * max softmax(class logits)
///
/// `slot_id` only labels errors.
inline BoundingBox decode_cell(std::span<const double> slot, int col, int row,
                               const AnchorPrior &anchor, const GridGeometry &grid,
                               std::size_t slot_id = 0) {
  if (slot.size() < 6)
    throw decode_error("decode: slot " + std::to_string(slot_id) +
                           " needs at least 6 channels",
                       slot_id);
  for (double v : slot) {
    if (!std::isfinite(v))
      throw decode_error("decode: non-finite value in slot " +
                             std::to_string(slot_id) + " (row " +
                             std::to_string(row) + ", col " + std::to_string(col) +
                             ")",
                         slot_id);
  }
  if (col < 0 || col >= grid.grid_w || row < 0 || row >= grid.grid_h)
    throw input_error("decode: cell outside grid");

  const double cx = (sigmoid(slot[ch_tx]) + col) * grid.cell_w();
  const double cy = (sigmoid(slot[ch_ty]) + row) * grid.cell_h();
  const double w = anchor.width * std::exp(slot[ch_tw]);
  const double h = anchor.height * std::exp(slot[ch_th]);
  if (!std::isfinite(w) || !std::isfinite(h) || !(w > 0.0) || !(h > 0.0))
    throw decode_error("decode: box size out of range in slot " +
                           std::to_string(slot_id),
                       slot_id);

  const auto probs = softmax(slot.subspan(ch_class0));
  const auto best = std::max_element(probs.begin(), probs.end());

  BoundingBox b = box_from_center(cx, cy, w, h);
  b.score = sigmoid(slot[ch_obj]) * *best;
  b.class_id = static_cast<int>(best - probs.begin());
  return b;
}

inline void check_anchor_count(const DetectionTensor &t,
                               const std::vector<AnchorPrior> &anchors) {
  if (anchors.empty())
    throw config_error("decode: anchor list is empty");
  if (anchors.size() != static_cast<std::size_t>(t.num_anchors))
    throw config_error("decode: tensor has " + std::to_string(t.num_anchors) +
                       " anchors per cell but " + std::to_string(anchors.size()) +
                       " anchor priors were supplied");
  for (std::size_t i = 0; i < anchors.size(); ++i)
    validate(anchors[i], "anchor " + std::to_string(i));
}

/// Every S*S*B candidate box, in slot order, before thresholding.
inline std::vector<BoundingBox> decode_candidates(const DetectionTensor &t,
                                                  const std::vector<AnchorPrior> &anchors) {
  validate(t);
  check_anchor_count(t, anchors);
  const GridGeometry grid = geometry_of(t);
  std::vector<BoundingBox> out;
  out.reserve(t.num_slots());
  for (int row = 0; row < t.grid_h; ++row)
    for (int col = 0; col < t.grid_w; ++col)
      for (int a = 0; a < t.num_anchors; ++a) {
        const std::size_t s = t.slot_index(row, col, a);
        out.push_back(decode_cell(t.slot(s), col, row,
                                  anchors[static_cast<std::size_t>(a)], grid, s));
      }
  return out;
}

/// Decodes, drops candidates scoring below the threshold and suppresses
/// overlaps. Survivors come back score-descending, ties in slot order.
inline std::vector<BoundingBox> decode_tensor(const DetectionTensor &t,
                                              const DecodeConfig &config) {
  if (!(config.score_threshold >= 0.0 && config.score_threshold <= 1.0))
    throw config_error("decode: score_threshold must lie in [0,1]");
  if (!(config.nms_iou > 0.0 && config.nms_iou <= 1.0))
    throw config_error("decode: nms_iou must lie in (0,1]");
  auto candidates = decode_candidates(t, config.anchors);
  std::erase_if(candidates, [&](const BoundingBox &b) {
    return *b.score < config.score_threshold;
  });
  return nms(candidates, config.nms_iou);
}

} // namespace rcdamage
