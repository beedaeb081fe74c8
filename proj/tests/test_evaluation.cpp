#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pseudolabel/error.hpp"
#include "pseudolabel/evaluation.hpp"

using namespace pseudolabel;

namespace {

const FrameDims kDims{8, 8};

VideoGt one_object(const BinaryMask& m, int frames = 1) {
  VideoGt gt;
  gt.video = {"v", kDims, frames};
  GtInstance inst{3, 1, {}};
  for (int t = 0; t < frames; ++t) inst.frames.push_back({true, rle_encode(m)});
  gt.objects.push_back(inst);
  return gt;
}

PseudoLabelSet pseudo_of(int id, const std::vector<std::optional<BinaryMask>>& masks) {
  PseudoLabelSet p;
  p.video = {"v", kDims, static_cast<int>(masks.size())};
  PseudoObject o{id, 1, {}};
  for (const auto& m : masks) {
    if (m) o.frames.push_back(rle_encode(*m));
    else o.frames.push_back(std::nullopt);
  }
  p.objects.push_back(o);
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::PipelineError;
}

}  // namespace

TEST(Iou, PerfectDisjointHalf) {
  const BinaryMask left = oracle::rect(kDims, 0, 0, 4, 8);
  const VideoGt gt = one_object(left);
  EXPECT_DOUBLE_EQ(pseudo_label_iou(pseudo_of(3, {left}), gt).mean_iou, 1.0);
  EXPECT_DOUBLE_EQ(pseudo_label_iou(pseudo_of(3, {oracle::rect(kDims, 4, 0, 8, 8)}), gt).mean_iou,
                   0.0);
  // 16 shared pixels over a 48 pixel union.
  EXPECT_NEAR(pseudo_label_iou(pseudo_of(3, {oracle::rect(kDims, 2, 0, 6, 8)}), gt).mean_iou,
              1.0 / 3.0, 1e-12);
}

TEST(Iou, SpatioTemporalSumsOverFrames) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  const VideoGt gt = one_object(m, 2);
  // Frame 0 exact, frame 1 missing: 16 / 32.
  EXPECT_NEAR(pseudo_label_iou(pseudo_of(3, {m, std::nullopt}), gt).mean_iou, 0.5, 1e-12);
}

TEST(Iou, MissingObjectScoresZero) {
  const VideoGt gt = one_object(oracle::rect(kDims, 0, 0, 2, 2));
  PseudoLabelSet empty;
  empty.video = gt.video;
  const auto s = pseudo_label_iou(empty, gt);
  ASSERT_EQ(s.per_object.size(), 1u);
  EXPECT_EQ(s.per_object[0].iou, 0.0);
}

TEST(Iou, UnknownObject) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 2, 2);
  EXPECT_EQ(code_of([&] { pseudo_label_iou(pseudo_of(9, {m}), one_object(m)); }),
            ErrorCode::UnknownObject);
}

TEST(Selection, BestTrackAndTies) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  const VideoGt gt = one_object(m);
  std::vector<TrackedProposal> tracks{oracle::make_track(10, {oracle::rect(kDims, 0, 0, 2, 4)}),
                                      oracle::make_track(11, {m}),
                                      oracle::make_track(12, {m})};
  const auto best = best_tracks(gt, tracks);
  EXPECT_EQ(best[0], (std::vector<std::size_t>{1, 2}));
  MatchResult pick_b{{{3, 12}}};
  EXPECT_DOUBLE_EQ(selection_accuracy(pick_b, gt, tracks), 1.0);
  MatchResult pick_a{{{3, 10}}};
  EXPECT_DOUBLE_EQ(selection_accuracy(pick_a, gt, tracks), 0.0);
}

TEST(Selection, SingleTrackIsAlwaysBest) {
  const VideoGt gt = one_object(oracle::rect(kDims, 0, 0, 4, 4));
  const std::vector<TrackedProposal> tracks{
      oracle::make_track(0, {oracle::rect(kDims, 6, 6, 8, 8)})};
  EXPECT_DOUBLE_EQ(selection_accuracy(MatchResult{{{3, 0}}}, gt, tracks), 1.0);
}

TEST(Selection, PerFrame) {
  const BinaryMask a = oracle::rect(kDims, 0, 0, 4, 4);
  const BinaryMask b = oracle::rect(kDims, 4, 4, 8, 8);
  const VideoGt gt = one_object(a, 2);
  const std::vector<TrackedProposal> tracks{oracle::make_track(0, {a, a}),
                                            oracle::make_track(1, {b, b})};
  const std::vector<FrameMatch> all_right{{0, {{{3, 0}}}}, {1, {{{3, 0}}}}};
  const std::vector<FrameMatch> half{{0, {{{3, 0}}}}, {1, {{{3, 1}}}}};
  EXPECT_DOUBLE_EQ(frame_selection_accuracy(all_right, gt, tracks), 1.0);
  EXPECT_DOUBLE_EQ(frame_selection_accuracy(half, gt, tracks), 0.5);
  EXPECT_EQ(selected_best_per_frame(all_right, gt, tracks), std::vector<bool>{true});
  EXPECT_EQ(selected_best_per_frame(half, gt, tracks), std::vector<bool>{false});
}

TEST(Report, BuildAndMerge) {
  const BinaryMask m = oracle::rect(kDims, 0, 0, 4, 4);
  VideoGt gt = one_object(m);
  EvalReport r1 = build_report(pseudo_of(3, {m}), gt, {true}, {{"k", 1}});
  EXPECT_DOUBLE_EQ(r1.mean_iou, 1.0);
  EXPECT_DOUBLE_EQ(r1.selection_accuracy, 1.0);
  EXPECT_EQ(r1.per_object[0].video, "v");
  gt.video.id = "u";
  EvalReport r2 = build_report(pseudo_of(3, {oracle::rect(kDims, 4, 4, 8, 8)}), gt, {false}, {});
  const std::vector<EvalReport> both{r1, r2};
  const EvalReport merged = merge_reports(both, {{"k", 2}});
  ASSERT_EQ(merged.per_object.size(), 2u);
  EXPECT_EQ(merged.per_object[0].video, "u");
  EXPECT_DOUBLE_EQ(merged.mean_iou, 0.5);
  EXPECT_DOUBLE_EQ(merged.selection_accuracy, 0.5);
  EXPECT_EQ(merged.config_echo["k"], 2);
}

TEST(Report, EmptyEval) {
  VideoGt gt;
  gt.video = {"v", kDims, 1};
  EXPECT_EQ(code_of([&] { build_report({}, gt, {}, {}); }), ErrorCode::EmptyEval);
  EXPECT_EQ(code_of([&] { merge_reports({}, {}); }), ErrorCode::EmptyEval);
}
