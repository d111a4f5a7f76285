// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "bss/error.hpp"
#include "bss/segmentation.hpp"
#include "test_support.hpp"

namespace bss {
namespace {

SegmentationConfig constrained(int m, int d_b, int d_p) {
  SegmentationConfig cfg;
  cfg.num_pairs = m;
  cfg.border_margin = d_b;
  cfg.min_spacing = d_p;
  cfg.constrained = true;
  return cfg;
}

// Border and pairwise-spacing violations of one point set, both axes.
int violations(const PointSet& pts, const SegmentationConfig& cfg, int w, int h) {
  int bad = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bad += pts[i].x < cfg.border_margin || pts[i].x > w - cfg.border_margin;
    bad += pts[i].y < cfg.border_margin || pts[i].y > h - cfg.border_margin;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      bad += std::abs(pts[i].x - pts[j].x) < cfg.min_spacing;
      bad += std::abs(pts[i].y - pts[j].y) < cfg.min_spacing;
    }
  }
  return bad;
}

TEST(SamplePoints, ZeroPairs) {
  Rng rng(1);
  EXPECT_TRUE(sample_points(constrained(0, 35, 40), 224, 224, rng).empty());
}

TEST(SamplePoints, DefaultConstraintsAt224) {
  const auto cfg = constrained(2, 35, 40);
  Rng rng(2);
  const PointSet pts = sample_points(cfg, 224, 224, rng);
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) {
    EXPECT_GE(p.x, 35);
    EXPECT_LE(p.x, 189);
    EXPECT_GE(p.y, 35);
    EXPECT_LE(p.y, 189);
  }
  EXPECT_GE(std::abs(pts[0].x - pts[1].x), 40);
  EXPECT_GE(std::abs(pts[0].y - pts[1].y), 40);
}

TEST(SamplePoints, InfeasibleConfigFailsBeforeSampling) {
  Rng rng(3);
  EXPECT_FALSE(is_feasible(constrained(5, 35, 60), 224));
  EXPECT_TRUE(is_feasible(constrained(5, 35, 38), 224));
  try {
    sample_points(constrained(5, 35, 60), 224, 224, rng);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos) << e.what();
  }
  // Only the height axis is too short; the message must say so.
  try {
    sample_points(constrained(2, 10, 40), 224, 50, rng);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("height"), std::string::npos) << e.what();
  }
  EXPECT_THROW(sample_points(constrained(-1, 0, 0), 8, 8, rng), ConfigError);
}

TEST(SamplePoints, FeasibilityBoundaryIsClosed) {
  // (M-1) * d_p == L - 2 d_b: exactly one arrangement per axis.
  const auto cfg = constrained(3, 2, 8);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    PointSet pts = sample_points(cfg, 20, 20, rng);
    std::vector<int> xs;
    for (const auto& p : pts) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    EXPECT_EQ(xs, (std::vector<int>{2, 10, 18}));
  }
}

TEST(SamplePoints, FuzzedConstrainedSamplesHoldInvariants) {
  Rng meta(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int w = static_cast<int>(meta.uniform_int(8, 128));
    const int h = static_cast<int>(meta.uniform_int(8, 128));
    const int m = static_cast<int>(meta.uniform_int(0, 4));
    const int d_b = static_cast<int>(meta.uniform_int(1, std::min(w, h) / 4));
    const int room = std::min(w, h) - 2 * d_b;
    const int d_p = m > 1 ? static_cast<int>(meta.uniform_int(1, std::max(1, room / (m - 1)))) : 1;
    const auto cfg = constrained(m, d_b, d_p);
    if (!is_feasible(cfg, w) || !is_feasible(cfg, h)) continue;
    Rng rng(trial);
    PointSet pts;
    try {
      pts = sample_points(cfg, w, h, rng);
    } catch (const SamplingError&) {
      continue;  // tight configurations may exhaust the budget; that is reported, not wrong
    }
    ASSERT_EQ(static_cast<int>(pts.size()), m);
    EXPECT_EQ(violations(pts, cfg, w, h), 0) << "w " << w << " h " << h << " m " << m;
    for (Axis axis : {Axis::Width, Axis::Height}) {
      const auto plan = plan_from_points(pts, axis, axis == Axis::Width ? w : h);
      int sum = 0;
      for (int l : plan.block_lengths()) {
        EXPECT_GE(l, 1);
        sum += l;
      }
      EXPECT_EQ(sum, plan.length());
    }
  }
}

TEST(SamplePoints, Deterministic) {
  const auto cfg = constrained(3, 10, 20);
  Rng a(77), b(77);
  EXPECT_EQ(sample_points(cfg, 100, 90, a), sample_points(cfg, 100, 90, b));
}

TEST(SamplePoints, RandomModeCoversEveryDecile) {
  SegmentationConfig cfg;
  cfg.num_pairs = 2;
  cfg.constrained = false;
  Rng rng(6);
  const int len = 224;
  std::vector<int> deciles(10, 0);
  for (int i = 0; i < 2000; ++i) {
    for (const auto& p : sample_points(cfg, len, len, rng)) {
      ASSERT_GE(p.x, 1);
      ASSERT_LE(p.x, len - 1);
      ASSERT_GE(p.y, 1);
      ASSERT_LE(p.y, len - 1);
      ++deciles[(p.x - 1) * 10 / (len - 1)];
    }
  }
  for (int c : deciles) EXPECT_GT(c, 0);
}

TEST(PlanFromPoints, SortsAndDifferences) {
  const PointSet pts{{150, 7}, {60, 9}};
  const auto plan = plan_from_points(pts, Axis::Width, 224);
  EXPECT_EQ(plan.boundaries(), (std::vector<int>{0, 60, 150, 224}));
  EXPECT_EQ(plan.block_lengths(), (std::vector<int>{60, 90, 74}));
  const auto rows = plan_from_points(pts, Axis::Height, 20);
  EXPECT_EQ(rows.boundaries(), (std::vector<int>{0, 7, 9, 20}));
}

TEST(PlanFromPoints, NoPointsGivesOneBlock) {
  const auto plan = plan_from_points({}, Axis::Height, 224);
  EXPECT_EQ(plan.boundaries(), (std::vector<int>{0, 224}));
  EXPECT_EQ(plan.block_lengths(), (std::vector<int>{224}));
}

TEST(PlanFromPoints, Errors) {
  EXPECT_THROW(plan_from_points({{100, 3}, {100, 5}}, Axis::Width, 224), DegeneratePlanError);
  EXPECT_THROW(plan_from_points({{0, 3}}, Axis::Width, 224), RangeError);
  EXPECT_THROW(plan_from_points({{224, 3}}, Axis::Width, 224), RangeError);
  EXPECT_THROW(SegmentationPlan(Axis::Width, 10, {0, 4, 4, 10}), DegeneratePlanError);
  EXPECT_THROW(SegmentationPlan(Axis::Width, 10, {1, 10}), ArgumentError);
}

TEST(Split, FollowsPlan) {
  const ImageTensor img = testing::random_image({3, 10, 224}, 1);
  const auto single = split(img, plan_from_points({}, Axis::Width, 224));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], img);

  const auto blocks = split(img, plan_from_points({{150, 1}, {60, 2}}, Axis::Width, 224));
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].width(), 60);
  EXPECT_EQ(blocks[1].width(), 90);
  EXPECT_EQ(blocks[2].width(), 74);
  EXPECT_EQ(concat_axis(blocks, Axis::Width), img);
}

TEST(Split, ExtentMismatch) {
  const auto plan = plan_from_points({}, Axis::Width, 224);
  EXPECT_THROW(split(ImageTensor(1, 4, 300), plan), ShapeError);
}

}  // namespace
}  // namespace bss
