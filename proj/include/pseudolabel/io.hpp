#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudolabel/evaluation.hpp"
#include "pseudolabel/matcher.hpp"
#include "pseudolabel/point_sampling.hpp"
#include "pseudolabel/scene.hpp"
#include "pseudolabel/tracker.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

using json = nlohmann::json;

// Deterministic text form: sorted keys, two-space indent, arrays of scalars
// on one line, floats with 17 significant digits, trailing newline.
std::string dump_json(const json& doc);

// Throws SchemaError (with an empty path) when the file cannot be read or parsed.
json read_json_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

// Matcher output together with the settings that produced it.
struct MatchDocument {
  VideoInfo video;
  MatchingMode matching = MatchingMode::SpatioTemporal;
  MatchWeights weights;
  ScoreSource score_source = ScoreSource::Maskness;
  MatchResult result;              // spatio-temporal
  std::vector<FrameMatch> frames;  // per-frame

  bool operator==(const MatchDocument&) const = default;
};

json to_json(const Rle& rle);
json to_json(const VideoGt& gt);
json to_json(const PointAnnotationSet& points);
json to_json(const VideoProposals& proposals);
json to_json(const VideoTracks& tracks);
json to_json(const PseudoLabelSet& pseudo);
json to_json(const MatchDocument& match);
json to_json(const EvalReport& report);
json to_json(const SceneConfig& scene);
json to_json(const ProposalNoiseConfig& noise);
json to_json(const SamplingSpec& spec);
json to_json(const MatchWeights& weights);

// Parsers validate every invariant and raise SchemaError naming `file`, the
// JSON pointer of the offending value and the reason.
VideoGt gt_from_json(const json& doc, const std::string& file = "gt.json");
PointAnnotationSet points_from_json(const json& doc, const std::string& file = "points.json");
VideoProposals proposals_from_json(const json& doc, const std::string& file = "proposals.json");
VideoTracks tracks_from_json(const json& doc, const std::string& file = "tracks.json");
PseudoLabelSet pseudo_from_json(const json& doc, const std::string& file = "pseudo.json");
MatchDocument match_from_json(const json& doc, const std::string& file = "match.json");
EvalReport report_from_json(const json& doc, const std::string& file = "report.json");
SceneConfig scene_from_json(const json& doc, const std::string& file = "scene.json");
ProposalNoiseConfig noise_from_json(const json& doc, const std::string& file = "noise");
SamplingSpec sampling_from_json(const json& doc, const std::string& file = "sampling");
MatchWeights weights_from_json(const json& doc, const std::string& file = "weights");

VideoGt load_gt(const std::filesystem::path& file);
PointAnnotationSet load_points(const std::filesystem::path& file);
VideoProposals load_proposals(const std::filesystem::path& file);
VideoTracks load_tracks(const std::filesystem::path& file);
PseudoLabelSet load_pseudo(const std::filesystem::path& file);
MatchDocument load_match(const std::filesystem::path& file);
EvalReport load_report(const std::filesystem::path& file);

template <typename Document>
void save_document(const std::filesystem::path& file, const Document& doc) {
  write_text_file(file, dump_json(to_json(doc)));
}

}  // namespace pseudolabel
