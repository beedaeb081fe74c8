#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudolabel/matcher.hpp"
#include "pseudolabel/tracker.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

struct ObjectEval {
  std::string video;
  int object_id = 0;
  double iou = 0.0;
  bool selected_best = false;

  bool operator==(const ObjectEval&) const = default;
};

struct EvalReport {
  std::vector<ObjectEval> per_object;  // sorted by (video, object_id)
  double mean_iou = 0.0;
  double selection_accuracy = 0.0;
  nlohmann::json config_echo = nlohmann::json::object();

  bool operator==(const EvalReport&) const = default;
};

struct ObjectIou {
  int object_id = 0;
  double iou = 0.0;
};

struct IouSummary {
  std::vector<ObjectIou> per_object;  // in gt order
  double mean_iou = 0.0;
};

// Spatio-temporal IoU per object over the frames where the object is present.
// Throws UnknownObject when a pseudo object id is missing from the ground truth.
IouSummary pseudo_label_iou(const PseudoLabelSet& pseudo, const VideoGt& gt);

// Summed overlap of every track with every ground-truth object over the
// object's present frames: overlaps[j][r].
std::vector<std::vector<Overlap>> track_overlaps(const VideoGt& gt,
                                                 std::span<const TrackedProposal> tracks);

// Indices (into `tracks`) attaining the maximum IoU for each object; ties
// are all kept.
std::vector<std::vector<std::size_t>> best_tracks(const VideoGt& gt,
                                                  std::span<const TrackedProposal> tracks);

// selected[j] is true when object j's assigned track reaches the best IoU.
std::vector<bool> selected_best(const MatchResult& result, const VideoGt& gt,
                                std::span<const TrackedProposal> tracks);

double selection_accuracy(const MatchResult& result, const VideoGt& gt,
                          std::span<const TrackedProposal> tracks);

// Per (object, annotated frame) accuracy. For per-frame results candidate r
// of frame t is tracks[r] at t; a choice is correct when that track is one
// of the object's best tracks.
double frame_selection_accuracy(std::span<const FrameMatch> results, const VideoGt& gt,
                                std::span<const TrackedProposal> tracks);
double frame_selection_accuracy(const MatchResult& result, std::span<const GtObject> annotations,
                                const VideoGt& gt, std::span<const TrackedProposal> tracks);

// Per-object correctness of per-frame results: every annotated frame chose
// one of the object's best tracks.
std::vector<bool> selected_best_per_frame(std::span<const FrameMatch> results, const VideoGt& gt,
                                          std::span<const TrackedProposal> tracks);

// Throws EmptyEval when there are no objects to score.
EvalReport build_report(const PseudoLabelSet& pseudo, const VideoGt& gt,
                        const std::vector<bool>& selected, nlohmann::json config_echo);

// Concatenates per-video reports and recomputes the aggregates.
EvalReport merge_reports(std::span<const EvalReport> reports, nlohmann::json config_echo);

}  // namespace pseudolabel
