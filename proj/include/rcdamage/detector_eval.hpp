#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/geometry.hpp"
#include "rcdamage/yolo_loss.hpp"

namespace rcdamage {

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points; // one per detection, descending score
  double ap = 0.0;
  std::size_t num_truths = 0;
  std::size_t num_detections = 0;
  bool no_truths = false; // detections present but nothing to recall
};

/// A detection after matching, in global ranking order.
struct MatchedDetection {
  std::size_t image = 0;
  std::size_t index = 0; // position within its image's detection list
  double score = 0.0;
  int class_id = 0;
  bool true_positive = false;
};

/// Greedy matching of scored detections to truths. Detections are visited in
/// descending score (ties: lower image index, then lower detection index).
/// Each one takes the unmatched same-class truth in its image with the highest
/// IoU; it is a true positive when that IoU reaches `iou_threshold`.
inline std::vector<MatchedDetection>
match_detections(const std::vector<std::vector<BoundingBox>> &dets,
                 const std::vector<std::vector<GroundTruthBox>> &truths,
                 double iou_threshold = 0.5) {
  if (dets.size() != truths.size())
    throw input_error("match: detections cover " + std::to_string(dets.size()) +
                      " images but ground truth covers " + std::to_string(truths.size()));
  std::vector<MatchedDetection> ranked;
  for (std::size_t img = 0; img < dets.size(); ++img)
    for (std::size_t i = 0; i < dets[img].size(); ++i) {
      const BoundingBox &d = dets[img][i];
      if (!d.score)
        throw input_error("match: detection " + std::to_string(i) + " of image " +
                          std::to_string(img) + " has no score");
      ranked.push_back({img, i, *d.score, d.class_id.value_or(0), false});
    }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const MatchedDetection &a, const MatchedDetection &b) {
                     return a.score > b.score;
                   });

  std::vector<std::vector<bool>> used(truths.size());
  for (std::size_t img = 0; img < truths.size(); ++img)
    used[img].assign(truths[img].size(), false);

  for (MatchedDetection &m : ranked) {
    const BoundingBox &d = dets[m.image][m.index];
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < truths[m.image].size(); ++j) {
      const GroundTruthBox &t = truths[m.image][j];
      if (used[m.image][j] || t.class_id != m.class_id)
        continue;
      const double v = iou(d, t.box);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best >= iou_threshold && best >= 0.0) {
      used[m.image][best_j] = true;
      m.true_positive = true;
    }
  }
  return ranked;
}

/// Precision/recall after every ranked detection, and AP as the area under
/// the precision envelope (all-points interpolation).
inline PRCurve average_precision(const std::vector<bool> &labels, std::size_t num_truths) {
  PRCurve curve;
  curve.num_truths = num_truths;
  curve.num_detections = labels.size();
  if (num_truths == 0) {
    curve.no_truths = !labels.empty();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto tp = std::count(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(i) + 1, true);
      curve.points.push_back({0.0, static_cast<double>(tp) / static_cast<double>(i + 1)});
    }
    curve.ap = 0.0;
    return curve;
  }

  std::size_t tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i])
      ++tp;
    curve.points.push_back({static_cast<double>(tp) / static_cast<double>(num_truths),
                            static_cast<double>(tp) / static_cast<double>(i + 1)});
  }

  // Envelope: running max of precision from the tail, kept in extended
  // precision so the area rounds once.
  std::vector<long double> envelope(labels.size());
  long double running = 0.0L;
  std::size_t hits = tp;
  for (std::size_t i = labels.size(); i-- > 0;) {
    running = std::max(running, static_cast<long double>(hits) / static_cast<long double>(i + 1));
    envelope[i] = running;
    if (labels[i])
      --hits;
  }
  // Recall steps by 1/num_truths at each true positive.
  long double sum = 0.0L;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i])
      sum += envelope[i];
  curve.ap = std::clamp(static_cast<double>(sum / static_cast<long double>(num_truths)), 0.0, 1.0);
  return curve;
}

inline double mean_average_precision(const std::vector<PRCurve> &per_class) {
  if (per_class.empty())
    throw input_error("mAP: at least one class is required");
  double sum = 0.0;
  for (const auto &c : per_class)
    sum += c.ap;
  return sum / static_cast<double>(per_class.size());
}

struct DetectorReport {
  std::map<int, PRCurve> per_class;
  double map = 0.0;
};

/// Matches, then builds one PR curve per class seen in either truths or
/// detections.
inline DetectorReport evaluate_detector(const std::vector<std::vector<BoundingBox>> &dets,
                                        const std::vector<std::vector<GroundTruthBox>> &truths,
                                        double iou_threshold = 0.5) {
  const auto ranked = match_detections(dets, truths, iou_threshold);
  std::set<int> classes;
  std::map<int, std::size_t> truth_count;
  for (const auto &img : truths)
    for (const auto &t : img) {
      classes.insert(t.class_id);
      ++truth_count[t.class_id];
    }
  for (const auto &m : ranked)
    classes.insert(m.class_id);

  DetectorReport report;
  if (classes.empty()) {
    // Nothing to evaluate: a single empty class-0 curve keeps mAP defined.
    report.per_class[0] = average_precision({}, 0);
    report.map = 0.0;
    return report;
  }
  std::vector<PRCurve> curves;
  for (int c : classes) {
    std::vector<bool> labels;
    for (const auto &m : ranked)
      if (m.class_id == c)
        labels.push_back(m.true_positive);
    report.per_class[c] = average_precision(labels, truth_count[c]);
    curves.push_back(report.per_class[c]);
  }
  report.map = mean_average_precision(curves);
  return report;
}

} // namespace rcdamage
