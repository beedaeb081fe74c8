#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pseudolabel/distance_transform.hpp"
#include "pseudolabel/error.hpp"
#include "pseudolabel/point_sampling.hpp"

using namespace pseudolabel;

namespace {

SamplingSpec spec_of(int n_pos, int n_neg, NegativeStrategy neg = NegativeStrategy::InBox,
                     std::uint64_t seed = 0) {
  SamplingSpec s;
  s.n_pos = n_pos;
  s.n_neg = n_neg;
  s.neg_strategy = neg;
  s.seed = seed;
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::PipelineError;
}

bool distinct(const std::vector<LabeledPoint>& pts) {
  std::set<std::pair<int, int>> s;
  for (const auto& p : pts) s.insert({p.x, p.y});
  return s.size() == pts.size();
}

VideoGt two_object_video() {
  VideoGt gt;
  gt.video = {"v", {12, 10}, 3};
  for (int j = 0; j < 2; ++j) {
    GtInstance inst;
    inst.id = j;
    inst.category = 1;
    for (int t = 0; t < 3; ++t) {
      const bool present = !(j == 1 && t == 2);
      const BinaryMask m = present ? oracle::disk({12, 10}, 3.0 + 5 * j, 4.0, 2.0)
                                   : BinaryMask({12, 10});
      inst.frames.push_back({present, rle_encode(m)});
    }
    gt.objects.push_back(inst);
  }
  return gt;
}

}  // namespace

TEST(Sampling, StrategyNames) {
  for (auto s : {PositiveStrategy::Random, PositiveStrategy::DistanceTransform})
    EXPECT_EQ(parse_positive_strategy(to_string(s)), s);
  for (auto s : {NegativeStrategy::InBox, NegativeStrategy::OutBox200, NegativeStrategy::OutMask,
                 NegativeStrategy::DistanceBand})
    EXPECT_EQ(parse_negative_strategy(to_string(s)), s);
  EXPECT_EQ(to_string(NegativeStrategy::OutBox200), "out-box-200");
  EXPECT_THROW(parse_negative_strategy("box"), Error);
}

TEST(Sampling, SinglePixelForced) {
  BinaryMask m({6, 6});
  m.set(3, 4, true);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto strat : {PositiveStrategy::Random, PositiveStrategy::DistanceTransform}) {
      SamplingSpec s = spec_of(1, 0, NegativeStrategy::InBox, seed);
      s.pos_strategy = strat;
      const auto pts = sample_positive(m, s);
      ASSERT_EQ(pts.size(), 1u);
      EXPECT_EQ(pts[0], (LabeledPoint{3, 4, PointLabel::Positive}));
    }
  }
}

TEST(Sampling, EmptyMaskIsEmptyRegion) {
  const BinaryMask m({5, 5});
  EXPECT_EQ(code_of([&] { sample_positive(m, spec_of(1, 0)); }), ErrorCode::EmptyRegion);
  EXPECT_EQ(code_of([&] { sample_negative(m, spec_of(0, 1, NegativeStrategy::InBox)); }),
            ErrorCode::EmptyRegion);
}

TEST(Sampling, TooManyPoints) {
  BinaryMask m({5, 5});
  m.set(1, 1, true);
  m.set(2, 1, true);
  EXPECT_EQ(code_of([&] { sample_positive(m, spec_of(3, 0)); }), ErrorCode::TooManyPoints);
}

TEST(Sampling, InBoxEmptyWhenMaskFillsBox) {
  const BinaryMask m = oracle::rect({4, 4}, 0, 0, 2, 4);
  EXPECT_EQ(code_of([&] { sample_negative(m, spec_of(0, 1, NegativeStrategy::InBox)); }),
            ErrorCode::EmptyRegion);
}

TEST(Sampling, OutMaskForced) {
  BinaryMask m({3, 3});
  m.set(1, 1, true);
  const auto pts = sample_negative(m, spec_of(0, 8, NegativeStrategy::OutMask));
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_TRUE(distinct(pts));
  for (const auto& p : pts) {
    EXPECT_FALSE(p.positive());
    EXPECT_FALSE(p.x == 1 && p.y == 1);
  }
}

TEST(Sampling, ScaledBox) {
  const BinaryMask m = oracle::rect({20, 20}, 8, 8, 12, 12);
  const auto box = scaled_box(m);
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, (BoundingBox{6, 6, 14, 14}));
  const BinaryMask corner = oracle::rect({20, 20}, 0, 0, 4, 4);
  EXPECT_EQ(*scaled_box(corner), (BoundingBox{0, 0, 6, 6}));
}

TEST(Sampling, RegionInvariants) {
  Rng rng(8);
  const FrameDims dims{40, 30};
  for (int i = 0; i < 30; ++i) {
    const BinaryMask m =
        oracle::disk(dims, 5 + rng.uniform() * 30, 5 + rng.uniform() * 20, 2 + rng.uniform() * 6);
    if (m.empty()) continue;
    const BoundingBox box = *bounding_box(m);
    const BoundingBox big = *scaled_box(m);
    const DistanceMap bg = background_distance_transform(m);
    for (auto strat : {NegativeStrategy::InBox, NegativeStrategy::OutBox200,
                       NegativeStrategy::OutMask, NegativeStrategy::DistanceBand}) {
      SamplingSpec s = spec_of(0, 5, strat, static_cast<std::uint64_t>(i));
      s.band_threshold = 3.0;
      std::vector<LabeledPoint> pts;
      try {
        pts = sample_negative(m, s);
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::TooManyPoints);
        continue;
      }
      EXPECT_TRUE(distinct(pts));
      for (const auto& p : pts) {
        ASSERT_FALSE(m.at(p.x, p.y));
        if (strat == NegativeStrategy::InBox) EXPECT_TRUE(box.contains(p.x, p.y));
        if (strat == NegativeStrategy::OutBox200) {
          EXPECT_FALSE(box.contains(p.x, p.y));
          EXPECT_TRUE(big.contains(p.x, p.y));
        }
        if (strat == NegativeStrategy::DistanceBand) EXPECT_LE(bg.value(p.x, p.y), 3.0);
      }
    }
    for (auto strat : {PositiveStrategy::Random, PositiveStrategy::DistanceTransform}) {
      SamplingSpec s = spec_of(3, 0);
      s.pos_strategy = strat;
      if (m.area() < 3) continue;
      const auto pts = sample_positive(m, s);
      EXPECT_TRUE(distinct(pts));
      for (const auto& p : pts) EXPECT_TRUE(m.at(p.x, p.y) && p.positive());
    }
  }
}

TEST(Sampling, DistanceBandOnLargeDisk) {
  const FrameDims dims{200, 200};
  const BinaryMask m = oracle::disk(dims, 99.5, 99.5, 40);
  SamplingSpec s = spec_of(0, 200, NegativeStrategy::DistanceBand, 3);
  s.band_threshold = 50;
  const auto pts = sample_negative(m, s);
  for (const auto& p : pts) {
    ASSERT_FALSE(m.at(p.x, p.y));
    std::int64_t best = INT64_MAX;
    for (int y = 0; y < 200; ++y)
      for (int x = 0; x < 200; ++x)
        if (m.at(x, y)) {
          const std::int64_t dx = x - p.x, dy = y - p.y;
          best = std::min(best, dx * dx + dy * dy);
        }
    EXPECT_LE(best, 2500);
  }
}

TEST(Sampling, DistanceTransformFavoursInterior) {
  const FrameDims dims{64, 64};
  const BinaryMask m = oracle::disk(dims, 31.5, 31.5, 20);
  const DistanceMap d = euclidean_distance_transform(m);
  double mean = 0.0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) mean += m.at(x, y) ? d.value(x, y) : 0.0;
  mean /= static_cast<double>(m.area());
  SamplingSpec s = spec_of(1, 0);
  s.pos_strategy = PositiveStrategy::DistanceTransform;
  Rng rng(99);
  double sampled = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_positive(m, s, rng)[0];
    sampled += d.value(p.x, p.y);
  }
  EXPECT_GT(sampled / n, mean);
}

TEST(Sampling, WeightedWithoutReplacement) {
  // Heavy pixel first, then the two light ones in any order.
  const RegionSampler sampler({{0, 0}, {1, 0}, {2, 0}}, {100.0, 1.0, 1.0});
  Rng rng(1);
  int heavy_first = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto pts = sampler.draw(3, rng);
    ASSERT_EQ(pts.size(), 3u);
    heavy_first += pts[0] == Pixel{0, 0};
  }
  EXPECT_GT(heavy_first, 1900);
  EXPECT_TRUE(sampler.draw(0, rng).empty());
}

TEST(Sampling, Deterministic) {
  const BinaryMask m = oracle::disk({30, 30}, 15, 15, 8);
  SamplingSpec s = spec_of(4, 4, NegativeStrategy::OutMask, 1234);
  EXPECT_EQ(sample_positive(m, s), sample_positive(m, s));
  EXPECT_EQ(sample_negative(m, s), sample_negative(m, s));
  SamplingSpec other = s;
  other.seed = 1235;
  EXPECT_NE(sample_positive(m, s), sample_positive(m, other));
}

TEST(Synthesize, P1AndP1N1) {
  const VideoGt gt = two_object_video();
  const auto p1 = synthesize_annotations(gt, spec_of(1, 0));
  ASSERT_EQ(p1.objects.size(), 2u);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& f = p1.objects[j].frames[t];
      EXPECT_EQ(f.present, gt.objects[j].frames[t].present);
      const BinaryMask m = rle_decode(gt.objects[j].frames[t].mask);
      if (!f.present) {
        EXPECT_TRUE(f.points.empty());
        continue;
      }
      ASSERT_EQ(f.points.size(), 1u);
      EXPECT_TRUE(m.at(f.points[0].x, f.points[0].y));
    }
  }
  const auto p1n1 = synthesize_annotations(gt, spec_of(1, 1, NegativeStrategy::InBox, 5));
  for (const auto& obj : p1n1.objects) {
    for (const auto& f : obj.frames) {
      if (!f.present) continue;
      ASSERT_EQ(f.points.size(), 2u);
      EXPECT_NE(f.points[0].positive(), f.points[1].positive());
    }
  }
  EXPECT_EQ(p1n1, synthesize_annotations(gt, spec_of(1, 1, NegativeStrategy::InBox, 5)));
}

TEST(Synthesize, EmptyRegionCarriesContextAndFallback) {
  VideoGt gt;
  gt.video = {"v", {8, 8}, 1};
  gt.objects.push_back({4, 1, {{true, rle_encode(oracle::rect({8, 8}, 2, 2, 5, 5))}}});
  try {
    synthesize_annotations(gt, spec_of(1, 1, NegativeStrategy::InBox));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRegion);
    EXPECT_NE(std::string(e.what()).find("object 4"), std::string::npos);
  }
  const auto pts = synthesize_annotations(gt, spec_of(1, 1, NegativeStrategy::InBox),
                                          NegativeStrategy::OutMask);
  EXPECT_EQ(pts.objects[0].frames[0].points.size(), 2u);
}
