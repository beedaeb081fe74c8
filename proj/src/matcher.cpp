#include "pseudolabel/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "detail/match_cost_kernels.hpp"
#include "pseudolabel/error.hpp"

namespace pseudolabel {

void validate(const MatchWeights& w) {
  for (const double v : {w.lambda_ann, w.lambda_cineg, w.lambda_maskness}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "match weights must be finite and non-negative");
    }
  }
  if (w.lambda_ann == 0.0 && w.lambda_cineg == 0.0 && w.lambda_maskness == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "at least one match weight must be positive");
  }
}

std::string_view to_string(MatchingMode m) {
  return m == MatchingMode::SpatioTemporal ? "spatio-temporal" : "per-frame";
}

MatchingMode parse_matching_mode(std::string_view s) {
  if (s == "spatio-temporal") return MatchingMode::SpatioTemporal;
  if (s == "per-frame") return MatchingMode::PerFrame;
  throw Error(ErrorCode::InvalidArgument, "unknown matching mode '" + std::string(s) + "'");
}

CandidateMasks::CandidateMasks(FrameDims dims, std::size_t candidates, std::size_t length)
    : dims_(dims), candidates_(candidates), length_(length), masks_(candidates * length) {}

void CandidateMasks::set(std::size_t candidate, std::size_t t, const Rle& mask) {
  if (mask.dims != dims_) throw Error(ErrorCode::DimsMismatch, "candidate mask dims differ");
  masks_[candidate * length_ + t].emplace(mask);
}

CandidateMasks CandidateMasks::from_tracks(std::span<const TrackedProposal> tracks,
                                           FrameDims dims, std::size_t length) {
  CandidateMasks out(dims, tracks.size(), length);
  const auto n = static_cast<std::ptrdiff_t>(tracks.size());
  std::vector<std::exception_ptr> errors(tracks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto& track = tracks[static_cast<std::size_t>(r)];
    try {
      for (std::size_t t = 0; t < std::min(length, track.frames.size()); ++t) {
        if (track.frames[t]) out.set(static_cast<std::size_t>(r), t, track.frames[t]->mask);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

CandidateMasks CandidateMasks::from_frame(std::span<const FrameProposal> proposals,
                                          FrameDims dims, std::size_t length, std::size_t t) {
  CandidateMasks out(dims, proposals.size(), length);
  for (std::size_t r = 0; r < proposals.size(); ++r) out.set(r, t, proposals[r].mask);
  return out;
}

CostMatrix CostBreakdown::weighted(const MatchWeights& w) const {
  CostMatrix m(rows, cols);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t r = 0; r < cols; ++r) {
      const std::size_t i = j * cols + r;
      m(j, r) = w.lambda_ann * ann[i] + w.lambda_cineg * cineg[i] + w.lambda_maskness * maskness[i];
    }
  }
  return m;
}

CostBreakdown compute_match_costs(const MatchProblem& problem) {
  CostBreakdown out = detail::make_breakdown(problem);
  const auto cells = static_cast<std::ptrdiff_t>(out.rows * out.cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::size_t j = idx / out.cols;
    const std::size_t r = idx % out.cols;
    detail::pair_costs(problem, j, r, out.ann[idx], out.cineg[idx]);
    out.maskness[idx] = 0.0 - problem.scores[r];
  }
  return out;
}

void validate_points(std::span<const GtObject> objects, FrameDims dims) {
  for (const auto& obj : objects) {
    for (std::size_t t = 0; t < obj.frames.size(); ++t) {
      for (const auto& p : obj.frames[t].points) {
        if (!dims.contains(p.x, p.y)) {
          throw Error(ErrorCode::OutOfBoundsPoint,
                      "object " + std::to_string(obj.object_id) + " frame " + std::to_string(t) +
                          ": point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") outside " + std::to_string(dims.width) + "x" +
                          std::to_string(dims.height));
        }
      }
    }
  }
}

namespace {

FrameDims track_dims(const TrackedProposal& track) {
  for (const auto& f : track.frames) {
    if (f) return f->mask.dims;
  }
  throw Error(ErrorCode::InvalidArgument,
              "track " + std::to_string(track.track_id) + " has no filled frame");
}

std::vector<int> all_frames(std::size_t length) {
  std::vector<int> frames(length);
  std::iota(frames.begin(), frames.end(), 0);
  return frames;
}

std::size_t video_length(std::span<const GtObject> objects, std::span<const TrackedProposal> tracks) {
  std::size_t length = 0;
  for (const auto& o : objects) length = std::max(length, o.frames.size());
  for (const auto& t : tracks) length = std::max(length, t.frames.size());
  return length;
}

// Pair costs of one object against one track; others are objects[k != j].
void single_pair(std::span<const GtObject> objects, std::size_t j, const TrackedProposal& track,
                 double& ann, double& cineg) {
  const FrameDims dims = track_dims(track);
  validate_points(objects, dims);
  const std::size_t length = video_length(objects, std::span(&track, 1));
  const CandidateMasks masks = CandidateMasks::from_tracks(std::span(&track, 1), dims, length);
  MatchProblem problem{objects, &masks, {0.0}, all_frames(length)};
  detail::pair_costs(problem, j, 0, ann, cineg);
}

void require_points(std::span<const GtObject> gt) {
  for (const auto& obj : gt) {
    bool any = false;
    for (const auto& f : obj.frames) any = any || (f.present && !f.points.empty());
    if (!any) {
      throw Error(ErrorCode::NoPoints,
                  "object " + std::to_string(obj.object_id) + " has no annotated points");
    }
  }
}

MatchResult solve(const MatchProblem& problem, std::span<const GtObject> objects,
                  std::span<const int> candidate_ids, const MatchWeights& w) {
  const CostBreakdown costs = compute_match_costs(problem);
  const Assignment a = solve_min_cost_assignment(costs.weighted(w));
  MatchResult result;
  for (std::size_t j = 0; j < objects.size(); ++j) {
    const std::size_t r = a.mapping[j];
    const std::size_t i = j * costs.cols + r;
    ObjectAssignment oa;
    oa.object_id = objects[j].object_id;
    oa.track_id = candidate_ids[r];
    oa.cost_ann = costs.ann[i];
    oa.cost_cineg = costs.cineg[i];
    oa.cost_maskness = costs.maskness[i];
    oa.total = w.lambda_ann * oa.cost_ann + w.lambda_cineg * oa.cost_cineg +
               w.lambda_maskness * oa.cost_maskness;
    result.assignments.push_back(oa);
  }
  return result;
}

}  // namespace

double cost_ann(const GtObject& obj, const TrackedProposal& track) {
  double ann = 0.0, cineg = 0.0;
  single_pair(std::span(&obj, 1), 0, track, ann, cineg);
  return ann;
}

double cost_cineg(const GtObject& obj, std::span<const GtObject> others,
                  const TrackedProposal& track) {
  std::vector<GtObject> all;
  all.reserve(others.size() + 1);
  all.push_back(obj);
  all.insert(all.end(), others.begin(), others.end());
  double ann = 0.0, cineg = 0.0;
  single_pair(all, 0, track, ann, cineg);
  return cineg;
}

double cost_maskness(const TrackedProposal& track, ScoreSource source) {
  return 0.0 - score(track, source);
}

MatchResult match_video(std::span<const GtObject> gt, std::span<const TrackedProposal> tracks,
                        const MatchWeights& w, ScoreSource source) {
  validate(w);
  if (gt.size() > tracks.size()) {
    throw Error(ErrorCode::NotEnoughProposals, std::to_string(gt.size()) + " objects but only " +
                                                   std::to_string(tracks.size()) + " tracks");
  }
  require_points(gt);
  if (gt.empty()) return {};

  const FrameDims dims = track_dims(tracks.front());
  validate_points(gt, dims);
  const std::size_t length = video_length(gt, tracks);
  const CandidateMasks masks = CandidateMasks::from_tracks(tracks, dims, length);

  MatchProblem problem{gt, &masks, {}, all_frames(length)};
  std::vector<int> ids;
  for (const auto& track : tracks) {
    problem.scores.push_back(score(track, source));
    ids.push_back(track.track_id);
  }
  return solve(problem, gt, ids, w);
}

std::vector<FrameMatch> match_per_frame(std::span<const GtObject> gt,
                                        std::span<const std::vector<FrameProposal>> frames,
                                        FrameDims dims, const MatchWeights& w,
                                        ScoreSource source, MasknessMode mode) {
  validate(w);
  require_points(gt);
  validate_points(gt, dims);

  std::vector<FrameMatch> out;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::vector<GtObject> annotated;
    for (const auto& obj : gt) {
      if (t < obj.frames.size() && obj.frames[t].present && !obj.frames[t].points.empty()) {
        annotated.push_back(obj);
      }
    }
    if (annotated.empty()) continue;
    const auto& proposals = frames[t];
    if (annotated.size() > proposals.size()) {
      throw Error(ErrorCode::NotEnoughProposals,
                  "frame " + std::to_string(t) + ": " + std::to_string(annotated.size()) +
                      " annotated objects but only " + std::to_string(proposals.size()) +
                      " proposals");
    }
    const CandidateMasks masks = CandidateMasks::from_frame(proposals, dims, frames.size(), t);
    MatchProblem problem{annotated, &masks, {}, {static_cast<int>(t)}};
    std::vector<int> ids;
    for (std::size_t r = 0; r < proposals.size(); ++r) {
      const FrameProposal& p = proposals[r];
      if (source == ScoreSource::Maskness) {
        problem.scores.push_back(maskness(std::span(&p.stats, 1), dims, mode));
      } else if (p.confidence) {
        problem.scores.push_back(*p.confidence);
      } else {
        throw Error(ErrorCode::MissingConfidence, "frame " + std::to_string(t) + " proposal " +
                                                      std::to_string(r) + " lacks a confidence");
      }
      ids.push_back(static_cast<int>(r));
    }
    out.push_back({static_cast<int>(t), solve(problem, annotated, ids, w)});
  }
  return out;
}

std::vector<std::vector<FrameProposal>> slice_tracks(std::span<const TrackedProposal> tracks,
                                                     FrameDims dims, std::size_t length) {
  std::vector<std::vector<FrameProposal>> frames(length);
  for (std::size_t t = 0; t < length; ++t) {
    for (const auto& track : tracks) {
      FrameProposal p;
      p.embedding = track.embedding_mean;
      if (t < track.frames.size() && track.frames[t]) {
        p.mask = track.frames[t]->mask;
        p.stats = track.frames[t]->stats;
        p.confidence = track.frames[t]->confidence;
      } else {
        p.mask = empty_rle(dims);
      }
      frames[t].push_back(std::move(p));
    }
  }
  return frames;
}

namespace {

PseudoObject pseudo_skeleton(const GtObject& obj, std::size_t length) {
  PseudoObject p;
  p.id = obj.object_id;
  p.category = obj.category;
  p.frames.resize(length);
  return p;
}

}  // namespace

PseudoLabelSet emit_pseudo_labels(const MatchResult& result, std::span<const GtObject> gt,
                                  std::span<const TrackedProposal> tracks,
                                  const VideoInfo& video) {
  std::map<int, const TrackedProposal*> by_id;
  for (const auto& t : tracks) by_id[t.track_id] = &t;
  std::map<int, int> assigned;
  for (const auto& a : result.assignments) {
    if (!by_id.count(a.track_id)) {
      throw Error(ErrorCode::InvalidArgument, "assignment references unknown track " +
                                                  std::to_string(a.track_id));
    }
    assigned[a.object_id] = a.track_id;
  }

  const auto length = static_cast<std::size_t>(video.length);
  PseudoLabelSet out{video, {}};
  for (const auto& obj : gt) {
    const auto it = assigned.find(obj.object_id);
    if (it == assigned.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "object " + std::to_string(obj.object_id) + " has no assignment");
    }
    const TrackedProposal& track = *by_id.at(it->second);
    PseudoObject p = pseudo_skeleton(obj, length);
    for (std::size_t t = 0; t < length; ++t) {
      if (t >= obj.frames.size() || !obj.frames[t].present) continue;
      if (t < track.frames.size() && track.frames[t]) {
        p.frames[t] = track.frames[t]->mask;
      } else {
        p.frames[t] = empty_rle(video.dims);
      }
    }
    out.objects.push_back(std::move(p));
  }
  return out;
}

PseudoLabelSet emit_per_frame_pseudo_labels(std::span<const FrameMatch> results,
                                            std::span<const GtObject> gt,
                                            std::span<const std::vector<FrameProposal>> frames,
                                            const VideoInfo& video) {
  const auto length = static_cast<std::size_t>(video.length);
  std::map<std::pair<int, int>, int> chosen;  // (object, t) -> proposal
  for (const auto& fm : results) {
    for (const auto& a : fm.result.assignments) {
      const auto t = static_cast<std::size_t>(fm.t);
      if (t >= frames.size() || a.track_id < 0 ||
          static_cast<std::size_t>(a.track_id) >= frames[t].size()) {
        throw Error(ErrorCode::InvalidArgument, "per-frame assignment out of range at frame " +
                                                    std::to_string(fm.t));
      }
      chosen[{a.object_id, fm.t}] = a.track_id;
    }
  }
  PseudoLabelSet out{video, {}};
  for (const auto& obj : gt) {
    PseudoObject p = pseudo_skeleton(obj, length);
    for (std::size_t t = 0; t < length; ++t) {
      if (t >= obj.frames.size() || !obj.frames[t].present) continue;
      const auto it = chosen.find({obj.object_id, static_cast<int>(t)});
      p.frames[t] = it != chosen.end()
                        ? frames[t][static_cast<std::size_t>(it->second)].mask
                        : empty_rle(video.dims);
    }
    out.objects.push_back(std::move(p));
  }
  return out;
}

}  // namespace pseudolabel
