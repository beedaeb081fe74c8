#include "pseudolabel/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pseudolabel/error.hpp"

namespace pseudolabel {

std::string_view to_string(ScoreSource s) {
  return s == ScoreSource::Maskness ? "maskness" : "confidence";
}

ScoreSource parse_score_source(std::string_view s) {
  if (s == "maskness") return ScoreSource::Maskness;
  if (s == "confidence") return ScoreSource::Confidence;
  throw Error(ErrorCode::InvalidArgument, "unknown score source '" + std::string(s) + "'");
}

std::string_view to_string(MasknessMode m) {
  return m == MasknessMode::ForegroundMean ? "foreground-mean" : "volume-mean";
}

MasknessMode parse_maskness_mode(std::string_view s) {
  if (s == "foreground-mean") return MasknessMode::ForegroundMean;
  if (s == "volume-mean") return MasknessMode::VolumeMean;
  throw Error(ErrorCode::InvalidArgument, "unknown maskness mode '" + std::string(s) + "'");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimsMismatch, "embedding sizes differ: " + std::to_string(a.size()) +
                                             " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

CostMatrix embedding_similarity_costs(std::span<const std::vector<double>> prev,
                                      std::span<const std::vector<double>> curr) {
  if (prev.empty() || curr.empty()) {
    throw Error(ErrorCode::InvalidArgument, "embedding cost needs non-empty inputs");
  }
  CostMatrix costs(prev.size(), curr.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    for (std::size_t j = 0; j < curr.size(); ++j) {
      costs(i, j) = 1.0 - cosine_similarity(prev[i], curr[j]);
    }
  }
  return costs;
}

CostMatrix embedding_similarity_costs(std::span<const FrameProposal> prev,
                                      std::span<const FrameProposal> curr) {
  std::vector<std::vector<double>> a, b;
  for (const auto& p : prev) a.push_back(p.embedding);
  for (const auto& p : curr) b.push_back(p.embedding);
  return embedding_similarity_costs(a, b);
}

double track_maskness(const TrackedProposal& track, FrameDims dims, MasknessMode mode) {
  std::vector<SoftFrameStats> stats;
  for (const auto& f : track.frames) {
    if (f) stats.push_back(f->stats);
  }
  if (stats.empty()) throw Error(ErrorCode::InvalidArgument, "track has no filled frame");
  return maskness(stats, dims, mode);
}

void refresh_scores(TrackedProposal& track, FrameDims dims, MasknessMode mode) {
  track.maskness = track_maskness(track, dims, mode);
  double sum = 0.0;
  std::size_t n = 0;
  bool complete = true;
  for (const auto& f : track.frames) {
    if (!f) continue;
    if (!f->confidence) {
      complete = false;
      break;
    }
    sum += *f->confidence;
    ++n;
  }
  track.confidence = complete && n > 0 ? std::optional<double>(sum / static_cast<double>(n))
                                       : std::nullopt;
}

std::vector<TrackedProposal> track_proposals(std::span<const std::vector<FrameProposal>> frames,
                                             FrameDims dims, MasknessMode mode) {
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "no frames to track");
  const std::size_t r = frames.front().size();
  if (r == 0) throw Error(ErrorCode::InvalidArgument, "frame 0 has no proposals");
  const std::size_t dim = frames.front().front().embedding.size();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].size() != r) {
      throw Error(ErrorCode::RaggedFrames, "frame " + std::to_string(t) + " has " +
                                               std::to_string(frames[t].size()) +
                                               " proposals, frame 0 has " + std::to_string(r));
    }
    for (const auto& p : frames[t]) {
      if (p.embedding.size() != dim) {
        throw Error(ErrorCode::DimsMismatch,
                    "frame " + std::to_string(t) + " has an embedding of size " +
                        std::to_string(p.embedding.size()) + ", expected " + std::to_string(dim));
      }
      if (p.mask.dims != dims) {
        throw Error(ErrorCode::DimsMismatch, "frame " + std::to_string(t) +
                                                 " has a proposal with mismatched dims");
      }
    }
  }

  const std::size_t length = frames.size();
  std::vector<TrackedProposal> tracks(r);
  std::vector<std::vector<double>> sums(r, std::vector<double>(dim, 0.0));
  auto attach = [&](std::size_t track, std::size_t t, std::size_t index) {
    const FrameProposal& p = frames[t][index];
    tracks[track].frames[t] = TrackFrame{p.mask, p.stats, p.confidence, static_cast<int>(index)};
    for (std::size_t d = 0; d < dim; ++d) sums[track][d] += p.embedding[d];
  };
  for (std::size_t k = 0; k < r; ++k) {
    tracks[k].frames.resize(length);
    attach(k, 0, k);
  }
  for (std::size_t t = 1; t < length; ++t) {
    std::vector<std::vector<double>> current;
    current.reserve(r);
    for (const auto& p : frames[t]) current.push_back(p.embedding);
    // Sums point the same way as the means, so cosine costs agree.
    const CostMatrix costs = embedding_similarity_costs(sums, current);
    const Assignment a = solve_min_cost_assignment(costs);
    for (std::size_t k = 0; k < r; ++k) attach(k, t, a.mapping[k]);
  }

  for (std::size_t k = 0; k < r; ++k) {
    tracks[k].embedding_mean = sums[k];
    for (double& v : tracks[k].embedding_mean) v /= static_cast<double>(length);
    refresh_scores(tracks[k], dims, mode);
  }
  std::stable_sort(tracks.begin(), tracks.end(),
                   [](const TrackedProposal& a, const TrackedProposal& b) {
                     return a.maskness > b.maskness;
                   });
  for (std::size_t k = 0; k < r; ++k) tracks[k].track_id = static_cast<int>(k);
  return tracks;
}

VideoTracks track_video(const VideoProposals& proposals, MasknessMode mode) {
  if (static_cast<int>(proposals.frames.size()) != proposals.video.length) {
    throw Error(ErrorCode::RaggedFrames, "proposal frames do not match the video length");
  }
  return {proposals.video, mode, track_proposals(proposals.frames, proposals.video.dims, mode)};
}

double score(const TrackedProposal& track, ScoreSource source) {
  if (source == ScoreSource::Maskness) return track.maskness;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : track.frames) {
    if (!f) continue;
    if (!f->confidence) {
      throw Error(ErrorCode::MissingConfidence,
                  "track " + std::to_string(track.track_id) + " lacks a per-frame confidence");
    }
    sum += *f->confidence;
    ++n;
  }
  if (n == 0) {
    if (track.confidence) return *track.confidence;
    throw Error(ErrorCode::MissingConfidence,
                "track " + std::to_string(track.track_id) + " has no confidence");
  }
  return sum / static_cast<double>(n);
}

}  // namespace pseudolabel
