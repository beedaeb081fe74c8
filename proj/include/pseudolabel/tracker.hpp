#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pseudolabel/assignment.hpp"
#include "pseudolabel/mask.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

// One per-frame class-agnostic proposal: binarized mask, soft statistics,
// query embedding and optional classifier confidence.
struct FrameProposal {
  Rle mask;
  SoftFrameStats stats;
  std::vector<double> embedding;
  std::optional<double> confidence;

  bool operator==(const FrameProposal&) const = default;
};

struct VideoProposals {
  VideoInfo video;
  std::vector<std::vector<FrameProposal>> frames;  // [t][r]

  bool operator==(const VideoProposals&) const = default;
};

struct TrackFrame {
  Rle mask;
  SoftFrameStats stats;
  std::optional<double> confidence;
  int proposal_index = -1;  // index into the source frame's proposal list

  bool operator==(const TrackFrame&) const = default;
};

struct TrackedProposal {
  int track_id = 0;
  std::vector<std::optional<TrackFrame>> frames;  // one slot per t
  std::vector<double> embedding_mean;
  double maskness = 0.0;
  // Mean per-frame confidence; unset unless every filled frame has one.
  std::optional<double> confidence;

  bool operator==(const TrackedProposal&) const = default;
};

struct VideoTracks {
  VideoInfo video;
  MasknessMode maskness_mode = MasknessMode::ForegroundMean;
  std::vector<TrackedProposal> tracks;

  bool operator==(const VideoTracks&) const = default;
};

enum class ScoreSource { Maskness, Confidence };

std::string_view to_string(ScoreSource s);
ScoreSource parse_score_source(std::string_view s);
std::string_view to_string(MasknessMode m);
MasknessMode parse_maskness_mode(std::string_view s);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// entry[i][j] = 1 - cos(prev[i], curr[j]); zero vectors have cosine 0.
CostMatrix embedding_similarity_costs(std::span<const FrameProposal> prev,
                                      std::span<const FrameProposal> curr);
CostMatrix embedding_similarity_costs(std::span<const std::vector<double>> prev,
                                      std::span<const std::vector<double>> curr);

// Links per-frame proposals into R tracks. Frame 0 seeds the tracks; every
// later frame is assigned to the tracks' running mean embeddings by minimum
// cost assignment. Output is sorted by descending maskness (stable on seed
// order) and track_id is the rank.
std::vector<TrackedProposal> track_proposals(
    std::span<const std::vector<FrameProposal>> frames, FrameDims dims,
    MasknessMode mode = MasknessMode::ForegroundMean);

VideoTracks track_video(const VideoProposals& proposals,
                        MasknessMode mode = MasknessMode::ForegroundMean);

// Maskness over the track's filled frames.
double track_maskness(const TrackedProposal& track, FrameDims dims, MasknessMode mode);

// Refreshes maskness and the cached mean confidence from the frames.
void refresh_scores(TrackedProposal& track, FrameDims dims, MasknessMode mode);

// maskness -> c_r; confidence -> mean per-frame classifier score.
double score(const TrackedProposal& track, ScoreSource source);

}  // namespace pseudolabel
