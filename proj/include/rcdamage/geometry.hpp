#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rcdamage/error.hpp"

namespace rcdamage {

/// Axis-aligned box in corner-plus-size form. Pixel coordinates, origin at
/// the top-left corner, y pointing down.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::optional<double> score;
  std::optional<int> class_id;

  double x_max() const { return x_min + width; }
  double y_max() const { return y_min + height; }
  double area() const { return width * height; }
  double center_x() const { return x_min + 0.5 * width; }
  double center_y() const { return y_min + 0.5 * height; }

  bool operator==(const BoundingBox &) const = default;
};

inline bool is_valid(const BoundingBox &b) {
  if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min))
    return false;
  if (!(b.width > 0.0) || !(b.height > 0.0) || !std::isfinite(b.width) ||
      !std::isfinite(b.height))
    return false;
  if (b.score && !(*b.score >= 0.0 && *b.score <= 1.0))
    return false;
  return true;
}

inline void validate(const BoundingBox &b, const std::string &where = "box") {
  if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min))
    throw input_error(where + ": corner coordinates must be finite");
  if (!(b.width > 0.0) || !std::isfinite(b.width))
    throw input_error(where + ": width must be a finite value > 0");
  if (!(b.height > 0.0) || !std::isfinite(b.height))
    throw input_error(where + ": height must be a finite value > 0");
  if (b.score && !(*b.score >= 0.0 && *b.score <= 1.0))
    throw input_error(where + ": score must lie in [0,1]");
}

inline BoundingBox make_box(double x_min, double y_min, double width,
                            double height,
                            std::optional<double> score = std::nullopt,
                            std::optional<int> class_id = std::nullopt) {
  BoundingBox b{x_min, y_min, width, height, score, class_id};
  validate(b);
  return b;
}

inline BoundingBox box_from_center(double cx, double cy, double width,
                                   double height) {
  return BoundingBox{cx - 0.5 * width, cy - 0.5 * height, width, height, {}, {}};
}

inline double intersection_area(const BoundingBox &a, const BoundingBox &b) {
  const double w = std::min(a.x_max(), b.x_max()) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max(), b.y_max()) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0)
    return 0.0;
  return w * h;
}

/// Intersection over union. Symmetric, in [0,1].
inline double iou(const BoundingBox &a, const BoundingBox &b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0)
    return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (inter >= uni)
    return 1.0;
  return inter / uni;
}

/// IoU of two rectangles given only their sizes, placed on a common center.
/// This is the shape similarity used by anchor clustering and responsibility
/// assignment.
inline double shape_iou(double w1, double h1, double w2, double h2) {
  const double inter = std::min(w1, w2) * std::min(h1, h2);
  const double uni = w1 * h1 + w2 * h2 - inter;
  if (inter >= uni)
    return 1.0;
  return inter / uni;
}

/// Greedy non-maximum suppression applied per class_id.
///
/// Boxes are visited in descending score order (ties: lower input index
/// first). A box is dropped when its IoU with an already kept box of the same
/// class exceeds `iou_threshold`. The result is sorted by descending score.
inline std::vector<BoundingBox> nms(const std::vector<BoundingBox> &boxes,
                                    double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw input_error("nms: iou_threshold must lie in (0,1]");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].score)
      throw input_error("nms: box " + std::to_string(i) + " has no score");
  }

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) {
                     return *boxes[l].score > *boxes[r].score;
                   });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const BoundingBox &cand = boxes[idx];
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (boxes[k].class_id != cand.class_id)
        continue;
      if (iou(boxes[k], cand) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed)
      kept.push_back(idx);
  }

  std::vector<BoundingBox> out;
  out.reserve(kept.size());
  for (std::size_t k : kept)
    out.push_back(boxes[k]);
  return out;
}

} // namespace rcdamage
