#include <gtest/gtest.h>

#include <filesystem>

#include "pseudolabel/error.hpp"
#include "pseudolabel/io.hpp"
#include "pseudolabel/pipeline.hpp"

using namespace pseudolabel;

namespace {

const VideoArtifacts& artifacts() {
  static const VideoArtifacts a = [] {
    PipelineConfig cfg;
    cfg.sampling.n_pos = 2;
    cfg.sampling.n_neg = 1;
    cfg.sampling.neg_strategy = NegativeStrategy::OutMask;
    RandomSceneOptions opt;
    opt.random_lifetimes = true;
    opt.length = 5;
    SuiteScene s{random_scene(7, opt, "io"), {}};
    s.noise.n_distractors = 3;
    s.noise.boundary_flip_prob = 0.05;
    return process_video(s, cfg);
  }();
  return a;
}

SchemaError schema_error_of(auto&& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e;
  } catch (const std::exception& e) {
    ADD_FAILURE() << "unexpected error: " << e.what();
  }
  ADD_FAILURE() << "no error";
  return SchemaError("", "", "");
}

}  // namespace

TEST(Io, RoundTrips) {
  const VideoArtifacts& a = artifacts();
  EXPECT_EQ(gt_from_json(to_json(a.gt)), a.gt);
  EXPECT_EQ(points_from_json(to_json(a.points)), a.points);
  EXPECT_EQ(proposals_from_json(to_json(a.proposals.proposals)), a.proposals.proposals);
  EXPECT_EQ(tracks_from_json(to_json(a.tracks)), a.tracks);
  EXPECT_EQ(match_from_json(to_json(a.match)), a.match);
  EXPECT_EQ(pseudo_from_json(to_json(a.pseudo)), a.pseudo);
  EXPECT_EQ(report_from_json(to_json(a.report)), a.report);
  EXPECT_EQ(scene_from_json(to_json(a.scene)), a.scene);
}

TEST(Io, PerFrameMatchRoundTrip) {
  PipelineConfig cfg;
  cfg.matching = MatchingMode::PerFrame;
  const MatchDocument doc = match_tracks(artifacts().points, artifacts().tracks, cfg);
  ASSERT_FALSE(doc.frames.empty());
  EXPECT_EQ(match_from_json(to_json(doc)), doc);
}

TEST(Io, ConfigRoundTrips) {
  ProposalNoiseConfig n;
  n.n_distractors = 7;
  n.embedding_noise = 0.125;
  EXPECT_EQ(noise_from_json(to_json(n)), n);
  SamplingSpec s;
  s.n_neg = 3;
  s.neg_strategy = NegativeStrategy::DistanceBand;
  s.band_threshold = 12.5;
  EXPECT_EQ(sampling_from_json(to_json(s)), s);
  MatchWeights w{1.5, 0.0, 2.5};
  EXPECT_EQ(weights_from_json(to_json(w)), w);
}

TEST(Io, ResaveIsByteIdentical) {
  const VideoArtifacts& a = artifacts();
  const auto dir = std::filesystem::temp_directory_path() / "pseudolabel_io_test";
  std::filesystem::remove_all(dir);
  save_document(dir / "tracks.json", a.tracks);
  save_document(dir / "gt.json", a.gt);
  const std::string first = dump_json(read_json_file(dir / "tracks.json"));
  EXPECT_EQ(dump_json(to_json(load_tracks(dir / "tracks.json"))), first);
  EXPECT_EQ(dump_json(to_json(load_gt(dir / "gt.json"))), dump_json(to_json(a.gt)));
  std::filesystem::remove_all(dir);
}

TEST(Io, DumpFormat) {
  const json doc = {{"b", {1, 2}}, {"a", 0.1}};
  EXPECT_EQ(dump_json(doc), "{\n  \"a\": 0.10000000000000001,\n  \"b\": [1, 2]\n}\n");
}

TEST(Io, PointOutsideFrameNamesObjectAndFrame) {
  json doc = to_json(artifacts().points);
  const int w = artifacts().points.video.dims.width;
  auto& obj = doc["objects"][1];
  std::size_t k = 0;
  while (obj["frames"][k]["points"].empty()) ++k;
  obj["frames"][k]["points"][0]["x"] = w;
  const SchemaError e = schema_error_of([&] { points_from_json(doc); });
  EXPECT_EQ(e.file(), "points.json");
  EXPECT_EQ(e.path(), "/objects/1/frames/" + std::to_string(k) + "/points/0/x");
  const std::string reason = e.reason();
  EXPECT_NE(reason.find("outside [0, " + std::to_string(w) + ")"), std::string::npos) << reason;
  EXPECT_NE(reason.find("object " + std::to_string(obj["id"].get<int>())),
            std::string::npos)
      << reason;
  EXPECT_NE(reason.find("frame " + std::to_string(obj["frames"][k]["t"].get<int>())),
            std::string::npos)
      << reason;
}

TEST(Io, RleLengthMismatch) {
  json doc = to_json(artifacts().gt);
  auto& counts = doc["objects"][0]["frames"][0]["rle"]["counts"];
  counts[counts.size() - 1] = counts.back().get<long long>() - 1;
  const SchemaError e = schema_error_of([&] { gt_from_json(doc); });
  EXPECT_EQ(e.path().rfind("/objects/0/frames/0/rle", 0), 0u) << e.path();
  EXPECT_NE(e.reason().find("rle length mismatch"), std::string::npos) << e.reason();
}

TEST(Io, RejectsBadDocuments) {
  const VideoArtifacts& a = artifacts();
  {
    json doc = to_json(a.gt);
    doc["objects"][1]["id"] = doc["objects"][0]["id"];
    schema_error_of([&] { gt_from_json(doc); });
  }
  {
    json doc = to_json(a.points);
    doc["objects"][0]["frames"][0]["points"] = {{{"x", 1}, {"y", 1}, {"label", "maybe"}}};
    doc["objects"][0]["frames"][0]["present"] = true;
    EXPECT_EQ(schema_error_of([&] { points_from_json(doc); }).path(),
              "/objects/0/frames/0/points/0/label");
  }
  {
    json doc = to_json(a.proposals.proposals);
    doc["frames"][0]["proposals"][0]["fg_area"] =
        doc["frames"][0]["proposals"][0]["fg_area"].get<long long>() + 1;
    schema_error_of([&] { proposals_from_json(doc); });
  }
  {
    json doc = to_json(a.proposals.proposals);
    doc["frames"][1]["proposals"][0]["embedding"].push_back(0.0);
    schema_error_of([&] { proposals_from_json(doc); });
  }
  {
    json doc = to_json(a.tracks);
    doc["tracks"][0]["frames"] = json::array();
    schema_error_of([&] { tracks_from_json(doc); });
  }
  {
    json doc = to_json(a.gt);
    doc["objects"][0]["frames"][0]["rle"]["w"] = 3;
    schema_error_of([&] { gt_from_json(doc); });
  }
  {
    json doc = to_json(a.gt);
    doc.erase("video");
    schema_error_of([&] { gt_from_json(doc); });
  }
  {
    json doc = to_json(MatchWeights{});
    doc["lambda_ann"] = -1.0;
    schema_error_of([&] { weights_from_json(doc); });
  }
}

TEST(Io, MissingFile) {
  const SchemaError e = schema_error_of([] { load_gt("/nonexistent/gt.json"); });
  EXPECT_EQ(e.path(), "");
}
