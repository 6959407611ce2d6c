#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcdamage/detector_eval.hpp"
#include "support.hpp"

using namespace rcdamage;
using rcdamage::testing::brute_force_ap;
using rcdamage::testing::Gen;

namespace {

BoundingBox det(double x, double y, double w, double h, double score, int cls = 0) {
  return make_box(x, y, w, h, score, cls);
}

GroundTruthBox truth(double x, double y, double w, double h, int cls = 0) {
  return {make_box(x, y, w, h), cls};
}

} // namespace

TEST(AveragePrecision, TruePositiveFalsePositiveTruePositive) {
  const auto c = average_precision({true, false, true}, 2);
  EXPECT_EQ(c.ap, 5.0 / 6.0);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_DOUBLE_EQ(c.points[1].recall, 0.5);
  EXPECT_DOUBLE_EQ(c.points[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(c.points[2].precision, 2.0 / 3.0);
}

TEST(AveragePrecision, TrailingFalsePositivesDoNotChangeAp) {
  EXPECT_DOUBLE_EQ(average_precision({true, true, false, false}, 2).ap, 1.0);
  EXPECT_DOUBLE_EQ(average_precision({true, false, true, false}, 2).ap, 5.0 / 6.0);
}

TEST(AveragePrecision, EdgeCases) {
  EXPECT_EQ(average_precision({}, 3).ap, 0.0);
  EXPECT_DOUBLE_EQ(average_precision({true}, 4).ap, 0.25);
  const auto none = average_precision({false, false}, 0);
  EXPECT_EQ(none.ap, 0.0);
  EXPECT_TRUE(none.no_truths);
  EXPECT_FALSE(average_precision({}, 0).no_truths);
}

TEST(AveragePrecisionProperty, MatchesThresholdSweepOracle) {
  Gen g(51);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = g.integer(0, 8);
    std::vector<bool> labels;
    int tp = 0;
    for (int i = 0; i < n; ++i) {
      labels.push_back(g.coin());
      tp += labels.back() ? 1 : 0;
    }
    const std::size_t truths = static_cast<std::size_t>(tp + g.integer(tp == 0 ? 1 : 0, 3));
    const double ap = average_precision(labels, truths).ap;
    EXPECT_NEAR(ap, brute_force_ap(labels, truths), 1e-9);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
  }
}

TEST(Map, MeanOfPerClassAp) {
  PRCurve a, b;
  a.ap = 5.0 / 6.0;
  b.ap = 1.0;
  EXPECT_DOUBLE_EQ(mean_average_precision({a, b}), 11.0 / 12.0);
  EXPECT_THROW(mean_average_precision({}), input_error);
}

TEST(Matching, GreedyByScoreAgainstUnmatchedTruths) {
  const std::vector<std::vector<GroundTruthBox>> truths{
      {truth(10, 10, 20, 20), truth(60, 60, 20, 20)}};
  const std::vector<std::vector<BoundingBox>> dets{
      {det(10, 10, 20, 20, 0.9), det(40, 10, 10, 10, 0.8), det(60, 60, 20, 20, 0.7)}};
  const auto report = evaluate_detector(dets, truths);
  ASSERT_EQ(report.per_class.size(), 1u);
  EXPECT_DOUBLE_EQ(report.per_class.at(0).ap, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(report.map, 5.0 / 6.0);
}

TEST(Matching, DuplicateDetectionIsFalsePositive) {
  const std::vector<std::vector<GroundTruthBox>> truths{{truth(0, 0, 10, 10)}};
  const std::vector<std::vector<BoundingBox>> dets{
      {det(0, 0, 10, 10, 0.5), det(0, 0, 10, 10, 0.9)}};
  const auto m = match_detections(dets, truths);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].index, 1u);
  EXPECT_TRUE(m[0].true_positive);
  EXPECT_FALSE(m[1].true_positive);
}

TEST(Matching, ThresholdAndClassRespected) {
  const std::vector<std::vector<GroundTruthBox>> truths{{truth(0, 0, 10, 10, 0)}};
  // IoU 0.5 exactly with (0,0,10,5).
  EXPECT_TRUE(match_detections({{det(0, 0, 10, 5, 0.9)}}, truths, 0.5)[0].true_positive);
  EXPECT_FALSE(match_detections({{det(0, 0, 10, 5, 0.9)}}, truths, 0.51)[0].true_positive);
  EXPECT_FALSE(match_detections({{det(0, 0, 10, 10, 0.9, 1)}}, truths)[0].true_positive);
}

TEST(Matching, ImagesAreIndependent) {
  const std::vector<std::vector<GroundTruthBox>> truths{{truth(0, 0, 10, 10)}, {}};
  const std::vector<std::vector<BoundingBox>> dets{{}, {det(0, 0, 10, 10, 0.9)}};
  const auto report = evaluate_detector(dets, truths);
  EXPECT_EQ(report.per_class.at(0).ap, 0.0);
  EXPECT_THROW(match_detections({{}}, truths), input_error);
}

TEST(Matching, PerfectDetectorAndMultipleClasses) {
  const std::vector<std::vector<GroundTruthBox>> truths{
      {truth(0, 0, 10, 10, 0), truth(50, 50, 10, 10, 1)}};
  const std::vector<std::vector<BoundingBox>> dets{
      {det(0, 0, 10, 10, 0.6, 0), det(50, 50, 10, 10, 0.7, 1), det(80, 80, 5, 5, 0.9, 1)}};
  const auto report = evaluate_detector(dets, truths);
  EXPECT_DOUBLE_EQ(report.per_class.at(0).ap, 1.0);
  EXPECT_DOUBLE_EQ(report.per_class.at(1).ap, 0.5);
  EXPECT_DOUBLE_EQ(report.map, 0.75);
}

TEST(MatchingProperty, EvaluatorAgreesWithOracleOnRandomScenes) {
  Gen g(52);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<GroundTruthBox>> truths(static_cast<std::size_t>(g.integer(1, 3)));
    std::vector<std::vector<BoundingBox>> dets(truths.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      for (int k = g.integer(0, 3); k > 0; --k)
        truths[i].push_back({g.box(), 0});
      total += truths[i].size();
      for (int k = g.integer(0, 4); k > 0; --k) {
        BoundingBox b = truths[i].empty() || g.coin(0.3) ? g.box()
                                                         : truths[i][g.integer(0, static_cast<int>(truths[i].size()) - 1)].box;
        b.x_min += g.uniform(-2, 2);
        b.score = g.uniform(0, 1);
        b.class_id = 0;
        dets[i].push_back(b);
      }
    }
    const auto ranked = match_detections(dets, truths);
    std::vector<bool> labels;
    for (const auto &m : ranked)
      labels.push_back(m.true_positive);
    if (total == 0 && labels.empty())
      continue;
    EXPECT_NEAR(evaluate_detector(dets, truths).per_class.at(0).ap, brute_force_ap(labels, total), 1e-9);
  }
}
