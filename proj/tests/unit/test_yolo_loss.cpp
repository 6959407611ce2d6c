#include <gtest/gtest.h>

#include <cmath>

#include "rcdamage/yolo_loss.hpp"
#include "support.hpp"

using namespace rcdamage;
using rcdamage::testing::Gen;

namespace {

const GridGeometry grid26{26, 26, 416, 416};

DetectionTensor blank(double fill = 0.0) { return make_tensor(26, 26, 10, 1, 416, 416, fill); }

double logit(double p) { return std::log(p / (1.0 - p)); }

// Tensor whose responsible slots reproduce every truth exactly, with
// saturated objectness, and whose other slots are saturated off.
DetectionTensor perfect_for(const std::vector<GroundTruthBox> &truths) {
  auto t = blank();
  for (std::size_t s = 0; s < t.num_slots(); ++s)
    t.slot(s)[ch_obj] = -40.0;
  const auto anchors = column_rebar_anchors();
  const auto map = assign_responsibility(truths, grid26, anchors);
  for (const auto &r : map.assigned) {
    const auto &b = truths[r.truth].box;
    auto slot = t.slot(t.slot_index(r.row, r.col, r.anchor));
    slot[ch_tx] = logit(b.center_x() / 16.0 - r.col);
    slot[ch_ty] = logit(b.center_y() / 16.0 - r.row);
    slot[ch_tw] = std::log(b.width / anchors[static_cast<std::size_t>(r.anchor)].width);
    slot[ch_th] = std::log(b.height / anchors[static_cast<std::size_t>(r.anchor)].height);
    slot[ch_obj] = 40.0;
  }
  return t;
}

std::vector<GroundTruthBox> sample_truths() {
  return {{make_box(31, 50, 100, 90), 0},
          {make_box(200, 120, 150, 260), 0},
          {make_box(300, 20, 60, 70), 0}};
}

} // namespace

TEST(Responsibility, CenterCellAndBestAnchor) {
  // Center (56, 72) lies in col 3, row 4; shape equals anchor 5 exactly.
  const auto truth = box_from_center(56, 72, 67, 206);
  const auto map = assign_responsibility({{truth, 0}}, grid26, column_rebar_anchors());
  ASSERT_EQ(map.assigned.size(), 1u);
  EXPECT_EQ(map.assigned[0].col, 3);
  EXPECT_EQ(map.assigned[0].row, 4);
  EXPECT_EQ(map.assigned[0].anchor, 5);
  EXPECT_TRUE(map.warnings.empty());
}

TEST(Responsibility, CenterOnFarEdgeClampsToLastCell) {
  const auto truth = box_from_center(416, 416, 20, 20);
  const auto map = assign_responsibility({{truth, 0}}, grid26, column_rebar_anchors());
  EXPECT_EQ(map.assigned[0].col, 25);
  EXPECT_EQ(map.assigned[0].row, 25);
}

TEST(Responsibility, CenterOutsideImageIsRejected) {
  const auto truth = box_from_center(420, 100, 20, 20);
  EXPECT_THROW(assign_responsibility({{truth, 0}}, grid26, column_rebar_anchors()), input_error);
}

TEST(Responsibility, CollisionKeepsLargerTruthAndWarns) {
  const auto small = box_from_center(56, 72, 100, 95);
  const auto large = box_from_center(57, 73, 106, 100);
  const auto map =
      assign_responsibility({{small, 0}, {large, 0}}, grid26, column_rebar_anchors());
  ASSERT_EQ(map.assigned.size(), 1u);
  EXPECT_EQ(map.assigned[0].truth, 1u);
  ASSERT_EQ(map.warnings.size(), 1u);
  EXPECT_NE(map.warnings[0].find("truth 0 dropped"), std::string::npos);
}

TEST(Loss, EmptyTruthUniformTensorClosedForm) {
  // Every slot sigma(t0) = 0.5: 0.5 * 26*26*10 * 0.25.
  const auto b = compute_loss(blank(), column_rebar_anchors(), {});
  EXPECT_EQ(b.total, 0.5 * 6760 * 0.25);
  EXPECT_EQ(b.total, 845.0);
  EXPECT_EQ(b.coord_xy + b.coord_wh + b.obj_conf + b.class_prob, 0.0);
}

TEST(Loss, PerfectPredictionVanishes) {
  const auto truths = sample_truths();
  const auto b = compute_loss(perfect_for(truths), column_rebar_anchors(), truths);
  EXPECT_LT(b.total, 1e-6);
}

TEST(Loss, BreakdownSumsToTotal) {
  Gen g(31);
  auto t = blank();
  for (double &v : t.values)
    v = g.uniform(-3, 3);
  const auto b = compute_loss(t, column_rebar_anchors(), sample_truths());
  EXPECT_NEAR(b.total, b.coord_xy + b.coord_wh + b.obj_conf + b.noobj_conf + b.class_prob,
              1e-12 * b.total);
  EXPECT_GT(b.coord_xy, 0.0);
  EXPECT_GT(b.noobj_conf, 0.0);
}

TEST(Loss, WeightsScaleTheirTermsLinearly) {
  Gen g(32);
  auto t = blank();
  for (double &v : t.values)
    v = g.uniform(-3, 3);
  const auto truths = sample_truths();
  const auto base = compute_loss(t, column_rebar_anchors(), truths, {1.0, 1.0});
  for (double lc : {0.5, 5.0, 17.0})
    for (double ln : {0.0, 0.5, 3.0}) {
      const auto b = compute_loss(t, column_rebar_anchors(), truths, {lc, ln});
      const double expect = lc * (base.coord_xy + base.coord_wh) + base.obj_conf +
                            ln * base.noobj_conf + base.class_prob;
      EXPECT_NEAR(b.total, expect, 1e-12 * expect);
      EXPECT_NEAR(b.coord_xy, lc * base.coord_xy, 1e-12 * b.coord_xy);
      EXPECT_NEAR(b.noobj_conf, ln * base.noobj_conf, 1e-12 * base.noobj_conf + 1e-300);
    }
}

TEST(Loss, OffsetPerturbationTouchesOnlyCenterAndConfidence) {
  const auto truths = sample_truths();
  auto t = perfect_for(truths);
  const auto map = assign_responsibility(truths, grid26, column_rebar_anchors());
  const auto &r = map.assigned[0];
  const auto before = compute_loss(t, column_rebar_anchors(), truths);
  t.values[t.value_index(r.row, r.col, r.anchor, ch_tx)] += 0.7;
  const auto after = compute_loss(t, column_rebar_anchors(), truths);
  EXPECT_GT(after.coord_xy, before.coord_xy);
  EXPECT_GT(after.obj_conf, before.obj_conf);
  EXPECT_EQ(after.coord_wh, before.coord_wh);
  EXPECT_EQ(after.noobj_conf, before.noobj_conf);
  EXPECT_EQ(after.class_prob, before.class_prob);
}

TEST(Loss, ClassTermUsesResponsibleSlotSoftmax) {
  auto t = make_tensor(2, 2, 1, 2, 64, 64, 0.0);
  const std::vector<AnchorPrior> anchors{{16, 16}};
  const std::vector<GroundTruthBox> truths{{box_from_center(16, 16, 16, 16), 1}};
  // Equal logits: (0.5 - 0)^2 + (0.5 - 1)^2.
  EXPECT_DOUBLE_EQ(compute_loss(t, anchors, truths).class_prob, 0.5);
  EXPECT_THROW(compute_loss(t, anchors, {{box_from_center(16, 16, 16, 16), 2}}), input_error);
}

TEST(LossProperty, SmoothInSizeLogit) {
  // Central differences at two step sizes agree to O(h^2).
  const auto truths = sample_truths();
  Gen g(33);
  auto t = blank();
  for (double &v : t.values)
    v = g.uniform(-0.3, 0.3);
  const auto map = assign_responsibility(truths, grid26, column_rebar_anchors());
  const auto &r = map.assigned[1];
  const std::size_t idx = t.value_index(r.row, r.col, r.anchor, ch_tw);
  auto f = [&](double dx) {
    auto u = t;
    u.values[idx] += dx;
    return compute_loss(u, column_rebar_anchors(), truths).total;
  };
  const double h = 1e-3;
  const double d1 = (f(h) - f(-h)) / (2 * h);
  const double d2 = (f(h / 2) - f(-h / 2)) / h;
  EXPECT_NE(d1, 0.0);
  EXPECT_NEAR(d1, d2, 1e-5 * std::max(1.0, std::abs(d1)));
}

TEST(LossProperty, NonNegativeForRandomTensors) {
  Gen g(34);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = blank();
    for (double &v : t.values)
      v = g.uniform(-5, 5);
    const auto b = compute_loss(t, column_rebar_anchors(), sample_truths());
    EXPECT_GE(b.coord_xy, 0.0);
    EXPECT_GE(b.coord_wh, 0.0);
    EXPECT_GE(b.obj_conf, 0.0);
    EXPECT_GE(b.noobj_conf, 0.0);
    EXPECT_GE(b.class_prob, 0.0);
  }
}

TEST(Loss, RejectsBadWeights) {
  EXPECT_THROW(compute_loss(blank(), column_rebar_anchors(), {}, {0.0, 0.5}), input_error);
  EXPECT_THROW(compute_loss(blank(), column_rebar_anchors(), {}, {5.0, -1.0}), input_error);
}
