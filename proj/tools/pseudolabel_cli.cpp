// Command-line driver: individual stages plus the full pipeline.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "pseudolabel/error.hpp"
#include "pseudolabel/io.hpp"
#include "pseudolabel/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pseudolabel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 1;
constexpr int kExitPipeline = 2;

struct Flags {
  double lambda_ann = 5.0;
  double lambda_cineg = 5.0;
  double lambda_maskness = 2.0;
  std::string score_source = "maskness";
  std::string maskness_mode = "foreground-mean";
  std::string matching = "spatio-temporal";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string fallback;

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.weights = {lambda_ann, lambda_cineg, lambda_maskness};
    cfg.score_source = parse_score_source(score_source);
    cfg.maskness_mode = parse_maskness_mode(maskness_mode);
    cfg.matching = parse_matching_mode(matching);
    cfg.seed = seed;
    cfg.threads = threads;
    if (!fallback.empty()) cfg.fallback = parse_negative_strategy(fallback);
    validate(cfg);
    return cfg;
  }
};

void add_weight_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--lambda-ann", f.lambda_ann, "weight of the annotation cost")->capture_default_str();
  cmd->add_option("--lambda-cineg", f.lambda_cineg, "weight of the cross-instance negative cost")
      ->capture_default_str();
  cmd->add_option("--lambda-maskness", f.lambda_maskness, "weight of the maskness cost")
      ->capture_default_str();
  cmd->add_option("--score-source", f.score_source, "maskness | confidence")->capture_default_str();
  cmd->add_option("--matching", f.matching, "spatio-temporal | per-frame")->capture_default_str();
}

void add_seed_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
  cmd->add_option("--fallback", f.fallback,
                  "negative strategy used when the requested region is empty");
}

void add_mode_flag(CLI::App* cmd, Flags& f) {
  cmd->add_option("--maskness-mode", f.maskness_mode, "foreground-mean | volume-mean")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-supervised video pseudo-label generation on synthetic scenes"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--threads", flags.threads, "OpenMP threads")->capture_default_str();

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "rasterize a scene and synthesize proposals");
  std::string scene_file, noise_file, out_dir = ".";
  std::optional<std::uint64_t> random_seed;
  RandomSceneOptions random_opts;
  gen->add_option("--config", scene_file, "scene.json");
  gen->add_option("--random", random_seed, "generate a random scene with this seed");
  gen->add_option("--width", random_opts.dims.width)->capture_default_str();
  gen->add_option("--height", random_opts.dims.height)->capture_default_str();
  gen->add_option("--length", random_opts.length)->capture_default_str();
  gen->add_option("--objects", random_opts.n_objects)->capture_default_str();
  gen->add_flag("--random-lifetimes", random_opts.random_lifetimes);
  gen->add_option("--noise", noise_file, "proposal noise settings (JSON)");
  gen->add_option("--out", out_dir, "output directory")->capture_default_str();
  add_seed_flags(gen, flags);

  // sample-points
  auto* sample = app.add_subcommand("sample-points", "simulate point annotations");
  std::string gt_file, points_out = "points.json";
  SamplingSpec spec;
  std::string pos_strategy = "random", neg_strategy = "in-box";
  sample->add_option("--gt", gt_file, "gt.json")->required();
  sample->add_option("--out", points_out)->capture_default_str();
  sample->add_option("--n-pos", spec.n_pos)->capture_default_str();
  sample->add_option("--n-neg", spec.n_neg)->capture_default_str();
  sample->add_option("--pos-strategy", pos_strategy, "random | distance-transform")
      ->capture_default_str();
  sample->add_option("--neg-strategy", neg_strategy,
                     "in-box | out-box-200 | out-mask | distance-band")
      ->capture_default_str();
  sample->add_option("--band-threshold", spec.band_threshold)->capture_default_str();
  add_seed_flags(sample, flags);

  // track
  auto* track = app.add_subcommand("track", "link per-frame proposals into tracks");
  std::string proposals_file, tracks_out = "tracks.json";
  track->add_option("--proposals", proposals_file, "proposals.json")->required();
  track->add_option("--out", tracks_out)->capture_default_str();
  add_mode_flag(track, flags);

  // match
  auto* match = app.add_subcommand("match", "assign tracks to annotated objects");
  std::string tracks_file, points_file, match_out = "match.json";
  match->add_option("--tracks", tracks_file, "tracks.json")->required();
  match->add_option("--points", points_file, "points.json")->required();
  match->add_option("--out", match_out)->capture_default_str();
  add_weight_flags(match, flags);

  // emit
  auto* emit = app.add_subcommand("emit", "write pseudo-labels for a match");
  std::string match_file, pseudo_out = "pseudo.json";
  emit->add_option("--match", match_file, "match.json")->required();
  emit->add_option("--tracks", tracks_file, "tracks.json")->required();
  emit->add_option("--points", points_file, "points.json")->required();
  emit->add_option("--out", pseudo_out)->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "score pseudo-labels against ground truth");
  std::string pseudo_file, report_out = "report.json";
  eval->add_option("--gt", gt_file, "gt.json")->required();
  eval->add_option("--tracks", tracks_file, "tracks.json")->required();
  eval->add_option("--match", match_file, "match.json")->required();
  eval->add_option("--pseudo", pseudo_file, "pseudo.json")->required();
  eval->add_option("--out", report_out)->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "full pipeline over a suite of scenes");
  std::string suite_file;
  bool demo = false;
  auto* demo_flag = run->add_flag("--demo", demo, "use the built-in demo suite");
  run->add_option("--config", suite_file, "suite.json")->excludes(demo_flag);
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  add_weight_flags(run, flags);
  add_mode_flag(run, flags);
  add_seed_flags(run, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPipeline;
  }

  try {
    const PipelineConfig cfg = flags.config();
    omp_set_num_threads(cfg.threads);

    if (*gen) {
      if (scene_file.empty() == !random_seed.has_value()) {
        throw Error(ErrorCode::InvalidArgument, "gen-scene needs exactly one of --config, --random");
      }
      SuiteScene scene;
      if (random_seed) {
        scene.scene = random_scene(*random_seed, random_opts, "scene_" + std::to_string(*random_seed));
      } else {
        scene.scene = scene_from_json(read_json_file(scene_file), scene_file);
      }
      validate(scene.scene);
      if (!noise_file.empty()) scene.noise = noise_from_json(read_json_file(noise_file), noise_file);
      const VideoGt gt = generate_scene(scene.scene);
      const SyntheticProposals proposals = generate_proposals(gt, effective_noise(cfg, scene));
      save_document(fs::path(out_dir) / "scene.json", scene.scene);
      save_document(fs::path(out_dir) / "gt.json", gt);
      save_document(fs::path(out_dir) / "proposals.json", proposals.proposals);
    } else if (*sample) {
      spec.pos_strategy = parse_positive_strategy(pos_strategy);
      spec.neg_strategy = parse_negative_strategy(neg_strategy);
      spec.seed = cfg.seed;
      const VideoGt gt = load_gt(gt_file);
      save_document(points_out, synthesize_annotations(gt, spec, cfg.fallback));
    } else if (*track) {
      save_document(tracks_out, track_video(load_proposals(proposals_file), cfg.maskness_mode));
    } else if (*match) {
      const VideoTracks tracks = load_tracks(tracks_file);
      save_document(match_out, match_tracks(load_points(points_file), tracks, cfg));
    } else if (*emit) {
      const VideoTracks tracks = load_tracks(tracks_file);
      save_document(pseudo_out,
                    emit_from_match(load_match(match_file), load_points(points_file), tracks));
    } else if (*eval) {
      const MatchDocument m = load_match(match_file);
      const json echo = {{"weights", to_json(m.weights)},
                         {"score_source", to_string(m.score_source)},
                         {"matching", to_string(m.matching)}};
      save_document(report_out, evaluate(m, load_pseudo(pseudo_file), load_gt(gt_file),
                                         load_tracks(tracks_file), echo));
    } else if (*run) {
      if (!demo && suite_file.empty()) {
        throw Error(ErrorCode::InvalidArgument, "run needs --demo or --config");
      }
      const Suite suite = demo ? demo_suite() : load_suite(suite_file);
      const PipelineResult result = run_pipeline(suite, cfg);
      write_artifacts(result, out_dir);
      std::printf("videos %zu  objects %zu  mean_iou %.4f  selection_accuracy %.4f\n",
                  result.videos.size(), result.report.per_object.size(), result.report.mean_iou,
                  result.report.selection_accuracy);
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}
