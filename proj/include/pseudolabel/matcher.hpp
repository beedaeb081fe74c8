#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pseudolabel/mask.hpp"
#include "pseudolabel/tracker.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

// Weights of the annotated, cross-instance negative and maskness costs.
struct MatchWeights {
  double lambda_ann = 5.0;
  double lambda_cineg = 5.0;
  double lambda_maskness = 2.0;

  bool operator==(const MatchWeights&) const = default;
};

void validate(const MatchWeights& w);

enum class MatchingMode { SpatioTemporal, PerFrame };

std::string_view to_string(MatchingMode m);
MatchingMode parse_matching_mode(std::string_view s);

struct ObjectAssignment {
  int object_id = 0;
  int track_id = 0;  // proposal index within the frame for per-frame matching
  double cost_ann = 0.0;
  double cost_cineg = 0.0;
  double cost_maskness = 0.0;
  double total = 0.0;

  bool operator==(const ObjectAssignment&) const = default;
};

struct MatchResult {
  std::vector<ObjectAssignment> assignments;  // in object order

  bool operator==(const MatchResult&) const = default;
};

struct FrameMatch {
  int t = 0;
  MatchResult result;

  bool operator==(const FrameMatch&) const = default;
};

struct PseudoObject {
  int id = 0;
  int category = 0;
  std::vector<std::optional<Rle>> frames;  // set only where the object is present

  bool operator==(const PseudoObject&) const = default;
};

struct PseudoLabelSet {
  VideoInfo video;
  std::vector<PseudoObject> objects;

  bool operator==(const PseudoLabelSet&) const = default;
};

// Binarized masks of R candidates over T frames with O(log runs) lookups.
// A candidate without a mask at t reads as background everywhere.
class CandidateMasks {
 public:
  CandidateMasks(FrameDims dims, std::size_t candidates, std::size_t length);

  static CandidateMasks from_tracks(std::span<const TrackedProposal> tracks, FrameDims dims,
                                    std::size_t length);
  static CandidateMasks from_frame(std::span<const FrameProposal> proposals, FrameDims dims,
                                   std::size_t length, std::size_t t);

  void set(std::size_t candidate, std::size_t t, const Rle& mask);

  FrameDims dims() const { return dims_; }
  std::size_t candidates() const { return candidates_; }
  std::size_t length() const { return length_; }
  bool at(std::size_t candidate, std::size_t t, int x, int y) const {
    const auto& idx = masks_[candidate * length_ + t];
    return idx && idx->at(x, y);
  }

 private:
  FrameDims dims_;
  std::size_t candidates_;
  std::size_t length_;
  std::vector<std::optional<RleIndex>> masks_;
};

// Everything needed to fill the J x R cost grid.
struct MatchProblem {
  std::span<const GtObject> objects;
  const CandidateMasks* masks = nullptr;
  std::vector<double> scores;  // per candidate; the maskness term is -score
  std::vector<int> frames;     // frames over which costs are summed
};

struct CostBreakdown {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> ann;  // row-major rows x cols
  std::vector<double> cineg;
  std::vector<double> maskness;

  CostMatrix weighted(const MatchWeights& w) const;
  bool operator==(const CostBreakdown&) const = default;
};

// OpenMP kernel over the J x R grid.
CostBreakdown compute_match_costs(const MatchProblem& problem);

namespace reference {
CostBreakdown compute_match_costs_serial(const MatchProblem& problem);
}

// Throws OutOfBoundsPoint for points outside `dims`.
void validate_points(std::span<const GtObject> objects, FrameDims dims);

// Number of annotated points whose label disagrees with the track mask,
// over the frames where the object is present.
double cost_ann(const GtObject& obj, const TrackedProposal& track);

// Number of other objects' positive points, on frames where `obj` is
// present, that the track covers.
double cost_cineg(const GtObject& obj, std::span<const GtObject> others,
                  const TrackedProposal& track);

double cost_maskness(const TrackedProposal& track, ScoreSource source);

MatchResult match_video(std::span<const GtObject> gt, std::span<const TrackedProposal> tracks,
                        const MatchWeights& w, ScoreSource source);

// Independent assignment on every frame that carries at least one annotated
// object; candidate r of frame t is frames[t][r].
std::vector<FrameMatch> match_per_frame(std::span<const GtObject> gt,
                                        std::span<const std::vector<FrameProposal>> frames,
                                        FrameDims dims, const MatchWeights& w,
                                        ScoreSource source,
                                        MasknessMode mode = MasknessMode::ForegroundMean);

// Per-frame view of linked tracks: frame t, candidate r is track r at t
// (an empty proposal where the track has no mask).
std::vector<std::vector<FrameProposal>> slice_tracks(std::span<const TrackedProposal> tracks,
                                                     FrameDims dims, std::size_t length);

// Copies the assigned track's masks and drops frames where the object is
// absent. Present frames without a track mask get an empty mask.
PseudoLabelSet emit_pseudo_labels(const MatchResult& result, std::span<const GtObject> gt,
                                  std::span<const TrackedProposal> tracks,
                                  const VideoInfo& video);

PseudoLabelSet emit_per_frame_pseudo_labels(std::span<const FrameMatch> results,
                                            std::span<const GtObject> gt,
                                            std::span<const std::vector<FrameProposal>> frames,
                                            const VideoInfo& video);

}  // namespace pseudolabel
