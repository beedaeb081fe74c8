#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pseudolabel/error.hpp"
#include "pseudolabel/matcher.hpp"

using namespace pseudolabel;
using oracle::neg;
using oracle::pos;

namespace {

const FrameDims kDims{8, 8};

GtObject object(int id, std::vector<std::vector<LabeledPoint>> per_frame,
                std::vector<bool> present = {}) {
  GtObject o;
  o.object_id = id;
  o.category = 1;
  for (std::size_t t = 0; t < per_frame.size(); ++t) {
    const bool p = present.empty() ? true : present[t];
    o.frames.push_back({p, p ? per_frame[t] : std::vector<LabeledPoint>{}});
  }
  return o;
}

}  // namespace

TEST(CostAnn, Examples) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  const TrackedProposal track = oracle::make_track(0, {m, m});
  const GtObject clean = object(0, {{pos(1, 1), neg(6, 6)}, {pos(2, 2), neg(5, 5)}});
  EXPECT_DOUBLE_EQ(cost_ann(clean, track), 0.0);
  const GtObject miss = object(0, {{pos(1, 1), pos(6, 1)}});
  EXPECT_DOUBLE_EQ(cost_ann(miss, oracle::make_track(0, {m})), 1.0);
}

TEST(CostAnn, TrackWithoutMaskMissesPositives) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  const TrackedProposal track = oracle::make_track(0, {m, std::nullopt});
  const GtObject o = object(0, {{pos(1, 1)}, {pos(1, 1), neg(2, 2)}});
  EXPECT_DOUBLE_EQ(cost_ann(o, track), 1.0);
}

TEST(CostAnn, AbsentFramesIgnored) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  GtObject o = object(0, {{pos(1, 1)}, {pos(7, 7)}});
  o.frames[1].present = false;  // stray points on an absent frame do not count
  EXPECT_DOUBLE_EQ(cost_ann(o, oracle::make_track(0, {m, m})), 0.0);
}

TEST(CostCineg, Examples) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  const TrackedProposal track = oracle::make_track(0, {m, m});
  const GtObject self = object(0, {{pos(1, 1)}, {pos(1, 1)}});
  const std::vector<GtObject> far{object(1, {{pos(6, 6)}, {pos(6, 6)}})};
  EXPECT_DOUBLE_EQ(cost_cineg(self, far, track), 0.0);
  const std::vector<GtObject> near{object(1, {{pos(2, 2), neg(3, 3)}, {pos(3, 3)}})};
  EXPECT_DOUBLE_EQ(cost_cineg(self, near, track), 2.0);
}

TEST(CostMaskness, Examples) {
  TrackedProposal t;
  t.maskness = 0.75;
  EXPECT_DOUBLE_EQ(cost_maskness(t, ScoreSource::Maskness), -0.75);
  t.maskness = 0.0;
  const double zero = cost_maskness(t, ScoreSource::Maskness);
  EXPECT_EQ(zero, 0.0);
  EXPECT_FALSE(std::signbit(zero));
  t.confidence = 1.0;
  EXPECT_DOUBLE_EQ(cost_maskness(t, ScoreSource::Confidence), -1.0);
  t.confidence.reset();
  EXPECT_THROW(cost_maskness(t, ScoreSource::Confidence), Error);
}

TEST(CostOracle, RandomInstances) {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const oracle::RandomInstance inst = oracle::random_instance(rng, 4, 5);
    for (std::size_t j = 0; j < inst.objects.size(); ++j) {
      std::vector<GtObject> others;
      for (std::size_t k = 0; k < inst.objects.size(); ++k)
        if (k != j) others.push_back(inst.objects[k]);
      for (const auto& track : inst.tracks) {
        ASSERT_EQ(cost_ann(inst.objects[j], track),
                  oracle::naive_cost_ann(inst.objects[j], track, kDims));
        ASSERT_EQ(cost_cineg(inst.objects[j], others, track),
                  oracle::naive_cost_cineg(inst.objects[j], inst.objects, track, kDims));
      }
    }
  }
}

TEST(CostOracle, Additivity) {
  Rng rng(78);
  for (int i = 0; i < 50; ++i) {
    const oracle::RandomInstance inst = oracle::random_instance(rng, 3, 3);
    const GtObject& obj = inst.objects[0];
    const TrackedProposal& track = inst.tracks[0];
    double sum = 0.0;
    for (std::size_t t = 0; t < obj.frames.size(); ++t) {
      GtObject single = obj;
      for (std::size_t s = 0; s < single.frames.size(); ++s)
        if (s != t) single.frames[s] = {false, {}};
      sum += cost_ann(single, track);
    }
    EXPECT_EQ(sum, cost_ann(obj, track));
  }
}

TEST(CostGrid, ParallelEqualsSerial) {
  Rng rng(79);
  for (int i = 0; i < 30; ++i) {
    const oracle::RandomInstance inst = oracle::random_instance(rng, 4, 6);
    const std::size_t length = inst.tracks[0].frames.size();
    const CandidateMasks masks = CandidateMasks::from_tracks(inst.tracks, kDims, length);
    MatchProblem p{inst.objects, &masks, {}, {}};
    for (const auto& t : inst.tracks) p.scores.push_back(t.maskness);
    for (std::size_t t = 0; t < length; ++t) p.frames.push_back(static_cast<int>(t));
    EXPECT_EQ(compute_match_costs(p), reference::compute_match_costs_serial(p));
  }
}

TEST(MatchVideo, AnnotationDominates) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 4, 4);
  const BinaryMask b = oracle::rect(kDims, 4, 4, 8, 8);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {b}), oracle::make_track(1, {a})};
  const std::vector<GtObject> gt{object(7, {{pos(1, 1)}})};
  const MatchResult r = match_video(gt, tracks, {}, ScoreSource::Maskness);
  ASSERT_EQ(r.assignments.size(), 1u);
  EXPECT_EQ(r.assignments[0].object_id, 7);
  EXPECT_EQ(r.assignments[0].track_id, 1);
  EXPECT_DOUBLE_EQ(r.assignments[0].cost_ann, 0.0);
  EXPECT_NEAR(r.assignments[0].total, 5.0 * 0 + 5.0 * 0 + 2.0 * -0.9, 1e-12);
}

TEST(MatchVideo, MasknessBreaksNestedTies) {
  const BinaryMask inner = oracle::rect(kDims, 1, 1, 4, 4);
  const BinaryMask outer = oracle::rect(kDims, 0, 0, 6, 6);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {outer}, 0.4),
                                            oracle::make_track(1, {inner}, 0.9)};
  const std::vector<GtObject> gt{object(0, {{pos(2, 2)}})};
  EXPECT_EQ(match_video(gt, tracks, {}, ScoreSource::Maskness).assignments[0].track_id, 1);
  EXPECT_EQ(match_video(gt, tracks, {5, 5, 0}, ScoreSource::Maskness).assignments[0].track_id, 0);
}

TEST(MatchVideo, CrossInstanceNegativesRejectUnion) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 3, 3);
  const BinaryMask b = oracle::rect(kDims, 5, 5, 8, 8);
  BinaryMask both = a;
  for (int y = 5; y < 8; ++y)
    for (int x = 5; x < 8; ++x) both.set(x, y, true);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {both}),
                                            oracle::make_track(1, {a}),
                                            oracle::make_track(2, {b})};
  const std::vector<GtObject> gt{object(0, {{pos(1, 1)}}), object(1, {{pos(6, 6)}})};
  const MatchResult full = match_video(gt, tracks, {5, 5, 0}, ScoreSource::Maskness);
  EXPECT_EQ(full.assignments[0].track_id, 1);
  EXPECT_EQ(full.assignments[1].track_id, 2);
  // Without the term the union ties and the lower id wins.
  const MatchResult ann = match_video(gt, tracks, {5, 0, 0}, ScoreSource::Maskness);
  EXPECT_EQ(ann.assignments[0].track_id, 0);
}

TEST(MatchVideo, Errors) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 3, 3);
  const std::vector<TrackedProposal> one{oracle::make_track(0, {a})};
  const std::vector<GtObject> two{object(0, {{pos(1, 1)}}), object(1, {{pos(2, 2)}})};
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::PipelineError;
  };
  EXPECT_EQ(code([&] { match_video(two, one, {}, ScoreSource::Maskness); }),
            ErrorCode::NotEnoughProposals);
  const std::vector<GtObject> empty{object(0, {{}})};
  EXPECT_EQ(code([&] { match_video(empty, one, {}, ScoreSource::Maskness); }), ErrorCode::NoPoints);
  const std::vector<GtObject> outside{object(0, {{pos(8, 0)}})};
  EXPECT_EQ(code([&] { match_video(outside, one, {}, ScoreSource::Maskness); }),
            ErrorCode::OutOfBoundsPoint);
  EXPECT_EQ(code([&] { match_video(two, one, {0, 0, 0}, ScoreSource::Maskness); }),
            ErrorCode::InvalidArgument);
}

TEST(MatchVideo, MatchesExhaustiveAssignment) {
  Rng rng(80);
  const MatchWeights w;
  for (int i = 0; i < 100; ++i) {
    const oracle::RandomInstance inst = oracle::random_instance(rng, 4, 6);
    const MatchResult r = match_video(inst.objects, inst.tracks, w, ScoreSource::Maskness);
    CostMatrix c(inst.objects.size(), inst.tracks.size());
    for (std::size_t j = 0; j < inst.objects.size(); ++j)
      for (std::size_t k = 0; k < inst.tracks.size(); ++k)
        c(j, k) = w.lambda_ann * oracle::naive_cost_ann(inst.objects[j], inst.tracks[k], kDims) +
                  w.lambda_cineg *
                      oracle::naive_cost_cineg(inst.objects[j], inst.objects, inst.tracks[k], kDims) +
                  w.lambda_maskness * (0.0 - inst.tracks[k].maskness);
    const Assignment o = oracle::exhaustive_assignment(c);
    for (std::size_t j = 0; j < inst.objects.size(); ++j) {
      ASSERT_EQ(static_cast<std::size_t>(r.assignments[j].track_id), o.mapping[j])
          << "case " << i;
    }
  }
}

TEST(MatchVideo, LambdaScaleInvariance) {
  Rng rng(81);
  for (int i = 0; i < 50; ++i) {
    const oracle::RandomInstance inst = oracle::random_instance(rng, 4, 6);
    const MatchResult base = match_video(inst.objects, inst.tracks, {}, ScoreSource::Maskness);
    for (const double k : {0.1, 3.0, 100.0}) {
      const MatchResult scaled =
          match_video(inst.objects, inst.tracks, {5 * k, 5 * k, 2 * k}, ScoreSource::Maskness);
      for (std::size_t j = 0; j < base.assignments.size(); ++j)
        EXPECT_EQ(scaled.assignments[j].track_id, base.assignments[j].track_id);
    }
  }
}

TEST(MatchPerFrame, SingleFrameEqualsSpatioTemporal) {
  Rng rng(82);
  for (int i = 0; i < 50; ++i) {
    oracle::RandomInstance inst = oracle::random_instance(rng, 3, 5);
    for (auto& o : inst.objects) o.frames.resize(1);
    for (auto& t : inst.tracks) {
      t.frames.resize(1);
      refresh_scores(t, kDims, MasknessMode::ForegroundMean);
    }
    const MatchResult st = match_video(inst.objects, inst.tracks, {}, ScoreSource::Maskness);
    const auto sliced = slice_tracks(inst.tracks, kDims, 1);
    const auto pf = match_per_frame(inst.objects, sliced, kDims, {}, ScoreSource::Maskness);
    ASSERT_EQ(pf.size(), 1u);
    EXPECT_EQ(pf[0].result, st);
    const VideoInfo video{"v", kDims, 1};
    EXPECT_EQ(emit_per_frame_pseudo_labels(pf, inst.objects, sliced, video),
              emit_pseudo_labels(st, inst.objects, inst.tracks, video));
  }
}

TEST(MatchPerFrame, SkipsUnannotatedFrames) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 3, 3);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {a, a, a})};
  const std::vector<GtObject> gt{object(0, {{pos(1, 1)}, {}, {pos(1, 1)}})};
  const auto sliced = slice_tracks(tracks, kDims, 3);
  const auto pf = match_per_frame(gt, sliced, kDims, {}, ScoreSource::Maskness);
  ASSERT_EQ(pf.size(), 2u);
  EXPECT_EQ(pf[0].t, 0);
  EXPECT_EQ(pf[1].t, 2);
}

TEST(Emit, BirthDeathPruning) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 3, 3);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {a, a, a})};
  const std::vector<GtObject> gt{object(3, {{pos(1, 1)}, {pos(1, 1)}, {}}, {true, true, false})};
  const MatchResult r = match_video(gt, tracks, {}, ScoreSource::Maskness);
  const PseudoLabelSet p = emit_pseudo_labels(r, gt, tracks, {"v", kDims, 3});
  ASSERT_EQ(p.objects.size(), 1u);
  EXPECT_EQ(p.objects[0].id, 3);
  EXPECT_EQ(p.objects[0].category, 1);
  ASSERT_TRUE(p.objects[0].frames[0] && p.objects[0].frames[1]);
  EXPECT_EQ(*p.objects[0].frames[0], rle_encode(a));
  EXPECT_FALSE(p.objects[0].frames[2]);
}

TEST(Emit, MissingTrackFrameGivesEmptyMask) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 3, 3);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {a, std::nullopt})};
  const std::vector<GtObject> gt{object(0, {{pos(1, 1)}, {}})};
  const MatchResult r = match_video(gt, tracks, {}, ScoreSource::Maskness);
  const PseudoLabelSet p = emit_pseudo_labels(r, gt, tracks, {"v", kDims, 2});
  ASSERT_TRUE(p.objects[0].frames[1]);
  EXPECT_EQ(*p.objects[0].frames[1], empty_rle(kDims));
}
