#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudolabel/evaluation.hpp"
#include "pseudolabel/io.hpp"
#include "pseudolabel/matcher.hpp"
#include "pseudolabel/point_sampling.hpp"
#include "pseudolabel/scene.hpp"
#include "pseudolabel/tracker.hpp"

namespace pseudolabel {

struct PipelineConfig {
  MatchWeights weights;
  ScoreSource score_source = ScoreSource::Maskness;
  MasknessMode maskness_mode = MasknessMode::ForegroundMean;
  MatchingMode matching = MatchingMode::SpatioTemporal;
  int threads = 1;
  std::uint64_t seed = 0;  // mixed into every sampling and proposal seed
  SamplingSpec sampling;
  std::optional<NegativeStrategy> fallback;

  bool operator==(const PipelineConfig&) const = default;
};

void validate(const PipelineConfig& cfg);

// Echoed into report.json.
json config_json(const PipelineConfig& cfg);

struct SuiteScene {
  SceneConfig scene;
  ProposalNoiseConfig noise;

  bool operator==(const SuiteScene&) const = default;
};

struct Suite {
  std::vector<SuiteScene> scenes;
  // Suite-level sampling settings; used unless the caller overrides them.
  std::optional<SamplingSpec> sampling;
  std::optional<NegativeStrategy> fallback;
};

// {"scenes": [{"scene": {...} | "random": {...}, "noise": {...}}],
//  "sampling": {...}, "fallback": "out-mask"}
Suite suite_from_json(const json& doc, const std::string& file = "suite.json");
Suite load_suite(const std::filesystem::path& file);

// Small mixed suite of moving ellipses and rectangles with nested and
// union-of-pairs distractors.
Suite demo_suite();

// Everything one video produces.
struct VideoArtifacts {
  SceneConfig scene;
  VideoGt gt;
  PointAnnotationSet points;
  SyntheticProposals proposals;
  VideoTracks tracks;
  MatchDocument match;
  PseudoLabelSet pseudo;
  EvalReport report;
};

// The sampling seed is cfg.seed (annotation sampling sub-seeds it per video,
// object and frame); the proposal seed mixes cfg.seed, the video id and the
// scene's own noise seed.
SamplingSpec effective_sampling(const PipelineConfig& cfg);
ProposalNoiseConfig effective_noise(const PipelineConfig& cfg, const SuiteScene& scene);

// Stage functions; errors carry the video and stage in their message.
VideoArtifacts process_video(const SuiteScene& scene, const PipelineConfig& cfg);

// Matches annotations against linked tracks with cfg's weights and matching
// mode and emits the pseudo-labels.
MatchDocument match_tracks(const PointAnnotationSet& points, const VideoTracks& tracks,
                           const PipelineConfig& cfg);
PseudoLabelSet emit_from_match(const MatchDocument& match, const PointAnnotationSet& points,
                               const VideoTracks& tracks);
EvalReport evaluate(const MatchDocument& match, const PseudoLabelSet& pseudo, const VideoGt& gt,
                    const VideoTracks& tracks, const json& config_echo);

struct PipelineResult {
  std::vector<VideoArtifacts> videos;  // in suite order
  EvalReport report;
};

// Videos are processed concurrently on cfg.threads threads; the output does
// not depend on the thread count. Suite-level sampling replaces cfg.sampling
// and the suite fallback applies when cfg has none.
PipelineResult run_pipeline(const Suite& suite, const PipelineConfig& cfg);

// Writes out/<video>/{scene,gt,points,proposals,tracks,match,pseudo,report}.json
// and out/report.json.
void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir);

}  // namespace pseudolabel
