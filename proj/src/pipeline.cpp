#include "pseudolabel/pipeline.hpp"

#include <exception>
#include <set>

#include "pseudolabel/error.hpp"
#include "pseudolabel/rng.hpp"

namespace pseudolabel {

void validate(const PipelineConfig& cfg) {
  validate(cfg.weights);
  if (cfg.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be positive");
  if (cfg.sampling.n_pos < 0 || cfg.sampling.n_neg < 0) {
    throw Error(ErrorCode::InvalidArgument, "point counts must be non-negative");
  }
}

json config_json(const PipelineConfig& cfg) {
  // Thread count is left out so reports match across --threads.
  return {{"weights", to_json(cfg.weights)},
          {"score_source", to_string(cfg.score_source)},
          {"maskness_mode", to_string(cfg.maskness_mode)},
          {"matching", to_string(cfg.matching)},
          {"seed", cfg.seed},
          {"sampling", to_json(cfg.sampling)},
          {"fallback", cfg.fallback ? json(to_string(*cfg.fallback)) : json(nullptr)}};
}

namespace {

template <typename Fn>
auto run_stage(const std::string& video, const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), video + ": " + stage + ": " + e.what());
  }
}

SceneConfig random_scene_from_json(const json& j, const std::string& file, const std::string& path) {
  RandomSceneOptions opt;
  auto get_int = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw SchemaError(file, path + "/" + key, "expected an integer");
    return j.at(key).get<int>();
  };
  auto get_double = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw SchemaError(file, path + "/" + key, "expected a number");
    return j.at(key).get<double>();
  };
  if (!j.is_object()) throw SchemaError(file, path, "expected an object");
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
    throw SchemaError(file, path + "/seed", "expected a non-negative integer");
  }
  const auto seed = j.at("seed").get<std::uint64_t>();
  std::string id = "scene_" + std::to_string(seed);
  if (j.contains("video_id")) {
    if (!j.at("video_id").is_string()) throw SchemaError(file, path + "/video_id", "expected a string");
    id = j.at("video_id").get<std::string>();
  }
  opt.dims.width = get_int("w", opt.dims.width);
  opt.dims.height = get_int("h", opt.dims.height);
  opt.length = get_int("t", opt.length);
  opt.n_objects = get_int("n_objects", opt.n_objects);
  opt.min_size = get_int("min_size", opt.min_size);
  opt.max_size = get_int("max_size", opt.max_size);
  opt.max_speed = get_double("max_speed", opt.max_speed);
  opt.rectangle_every = get_int("rectangle_every", opt.rectangle_every);
  if (j.contains("random_lifetimes")) {
    if (!j.at("random_lifetimes").is_boolean()) {
      throw SchemaError(file, path + "/random_lifetimes", "expected a boolean");
    }
    opt.random_lifetimes = j.at("random_lifetimes").get<bool>();
  }
  try {
    return random_scene(seed, opt, id);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(file, path, e.what());
  }
}

}  // namespace

Suite suite_from_json(const json& doc, const std::string& file) {
  if (!doc.is_object()) throw SchemaError(file, "/", "expected an object");
  if (!doc.contains("scenes") || !doc.at("scenes").is_array()) {
    throw SchemaError(file, "/scenes", "expected an array of scenes");
  }
  Suite suite;
  std::set<std::string> ids;
  const json& scenes = doc.at("scenes");
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const std::string path = "/scenes/" + std::to_string(i);
    const json& s = scenes[i];
    if (!s.is_object()) throw SchemaError(file, path, "expected an object");
    SuiteScene entry;
    const std::string at = file + ":" + path;
    if (s.contains("scene")) {
      entry.scene = scene_from_json(s.at("scene"), at + "/scene");
      try {
        validate(entry.scene);
      } catch (const Error& e) {
        throw SchemaError(file, path + "/scene", e.what());
      }
    } else if (s.contains("random")) {
      entry.scene = random_scene_from_json(s.at("random"), file, path + "/random");
    } else {
      throw SchemaError(file, path, "expected a \"scene\" or \"random\" entry");
    }
    if (s.contains("noise")) entry.noise = noise_from_json(s.at("noise"), at + "/noise");
    if (!ids.insert(entry.scene.video_id).second) {
      throw SchemaError(file, path, "duplicate video id " + entry.scene.video_id);
    }
    suite.scenes.push_back(std::move(entry));
  }
  if (suite.scenes.empty()) throw SchemaError(file, "/scenes", "suite has no scenes");
  if (doc.contains("sampling")) suite.sampling = sampling_from_json(doc.at("sampling"), file + ":/sampling");
  if (doc.contains("fallback") && !doc.at("fallback").is_null()) {
    if (!doc.at("fallback").is_string()) throw SchemaError(file, "/fallback", "expected a string");
    try {
      suite.fallback = parse_negative_strategy(doc.at("fallback").get<std::string>());
    } catch (const Error& e) {
      throw SchemaError(file, "/fallback", e.what());
    }
  }
  return suite;
}

Suite load_suite(const std::filesystem::path& file) {
  return suite_from_json(read_json_file(file), file.string());
}

Suite demo_suite() {
  Suite suite;
  RandomSceneOptions opt;
  opt.dims = {96, 96};
  opt.length = 6;
  opt.n_objects = 4;
  for (int i = 0; i < 6; ++i) {
    SuiteScene s;
    const auto seed = static_cast<std::uint64_t>(101 + i);
    s.scene = random_scene(seed, opt, "demo_" + std::to_string(i));
    s.noise.boundary_flip_prob = 0.1;
    s.noise.n_distractors = 4;
    s.noise.seed = seed;
    suite.scenes.push_back(std::move(s));
  }
  SamplingSpec sampling;
  sampling.n_pos = 1;
  sampling.n_neg = 1;
  sampling.pos_strategy = PositiveStrategy::DistanceTransform;
  sampling.neg_strategy = NegativeStrategy::OutBox200;
  suite.sampling = sampling;
  suite.fallback = NegativeStrategy::OutMask;
  return suite;
}

SamplingSpec effective_sampling(const PipelineConfig& cfg) {
  SamplingSpec spec = cfg.sampling;
  spec.seed = cfg.seed;
  return spec;
}

ProposalNoiseConfig effective_noise(const PipelineConfig& cfg, const SuiteScene& scene) {
  ProposalNoiseConfig noise = scene.noise;
  noise.seed = sub_seed(cfg.seed, scene.scene.video_id, 0, 0, scene.noise.seed);
  return noise;
}

MatchDocument match_tracks(const PointAnnotationSet& points, const VideoTracks& tracks,
                           const PipelineConfig& cfg) {
  if (points.video != tracks.video) {
    throw Error(ErrorCode::DimsMismatch, "points and tracks describe different videos");
  }
  MatchDocument doc;
  doc.video = tracks.video;
  doc.matching = cfg.matching;
  doc.weights = cfg.weights;
  doc.score_source = cfg.score_source;
  if (cfg.matching == MatchingMode::SpatioTemporal) {
    doc.result = match_video(points.objects, tracks.tracks, cfg.weights, cfg.score_source);
  } else {
    const auto length = static_cast<std::size_t>(tracks.video.length);
    const auto sliced = slice_tracks(tracks.tracks, tracks.video.dims, length);
    doc.frames = match_per_frame(points.objects, sliced, tracks.video.dims, cfg.weights,
                                 cfg.score_source, tracks.maskness_mode);
  }
  return doc;
}

PseudoLabelSet emit_from_match(const MatchDocument& match, const PointAnnotationSet& points,
                               const VideoTracks& tracks) {
  if (match.video != tracks.video || points.video != tracks.video) {
    throw Error(ErrorCode::DimsMismatch, "match, points and tracks describe different videos");
  }
  if (match.matching == MatchingMode::SpatioTemporal) {
    return emit_pseudo_labels(match.result, points.objects, tracks.tracks, tracks.video);
  }
  const auto sliced =
      slice_tracks(tracks.tracks, tracks.video.dims, static_cast<std::size_t>(tracks.video.length));
  return emit_per_frame_pseudo_labels(match.frames, points.objects, sliced, tracks.video);
}

EvalReport evaluate(const MatchDocument& match, const PseudoLabelSet& pseudo, const VideoGt& gt,
                    const VideoTracks& tracks, const json& config_echo) {
  const std::vector<bool> selected =
      match.matching == MatchingMode::SpatioTemporal
          ? selected_best(match.result, gt, tracks.tracks)
          : selected_best_per_frame(match.frames, gt, tracks.tracks);
  return build_report(pseudo, gt, selected, config_echo);
}

VideoArtifacts process_video(const SuiteScene& scene, const PipelineConfig& cfg) {
  const std::string& id = scene.scene.video_id;
  VideoArtifacts a;
  a.scene = scene.scene;
  a.gt = run_stage(id, "gen-scene", [&] { return generate_scene(scene.scene); });
  a.proposals = run_stage(id, "gen-scene", [&] {
    return generate_proposals(a.gt, effective_noise(cfg, scene));
  });
  a.points = run_stage(id, "sample-points", [&] {
    return synthesize_annotations(a.gt, effective_sampling(cfg), cfg.fallback);
  });
  a.tracks = run_stage(id, "track", [&] {
    return track_video(a.proposals.proposals, cfg.maskness_mode);
  });
  a.match = run_stage(id, "match", [&] { return match_tracks(a.points, a.tracks, cfg); });
  a.pseudo = run_stage(id, "emit", [&] { return emit_from_match(a.match, a.points, a.tracks); });
  a.report = run_stage(id, "eval", [&] {
    return evaluate(a.match, a.pseudo, a.gt, a.tracks, config_json(cfg));
  });
  return a;
}

PipelineResult run_pipeline(const Suite& suite, const PipelineConfig& base) {
  PipelineConfig cfg = base;
  if (suite.sampling) cfg.sampling = *suite.sampling;
  if (!cfg.fallback) cfg.fallback = suite.fallback;
  validate(cfg);
  if (suite.scenes.empty()) throw Error(ErrorCode::PipelineError, "suite has no scenes");

  const auto n = static_cast<std::ptrdiff_t>(suite.scenes.size());
  PipelineResult result;
  result.videos.resize(suite.scenes.size());
  std::vector<std::exception_ptr> errors(suite.scenes.size());
#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      result.videos[i] = process_video(suite.scenes[i], cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<EvalReport> reports;
  for (const auto& v : result.videos) reports.push_back(v.report);
  result.report = merge_reports(reports, config_json(cfg));
  return result;
}

void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir) {
  for (const auto& v : result.videos) {
    const auto dir = out_dir / v.gt.video.id;
    save_document(dir / "scene.json", v.scene);
    save_document(dir / "gt.json", v.gt);
    save_document(dir / "points.json", v.points);
    save_document(dir / "proposals.json", v.proposals.proposals);
    save_document(dir / "tracks.json", v.tracks);
    save_document(dir / "match.json", v.match);
    save_document(dir / "pseudo.json", v.pseudo);
    save_document(dir / "report.json", v.report);
  }
  save_document(out_dir / "report.json", result.report);
}

}  // namespace pseudolabel
