#include <benchmark/benchmark.h>

#include <numeric>

#include "pseudolabel/assignment.hpp"
#include "pseudolabel/distance_transform.hpp"
#include "pseudolabel/matcher.hpp"
#include "pseudolabel/pipeline.hpp"
#include "pseudolabel/rng.hpp"

using namespace pseudolabel;

namespace {

BinaryMask blobby_mask(int side, std::uint64_t seed) {
  Rng rng(seed);
  BinaryMask m({side, side});
  for (int k = 0; k < 12; ++k) {
    const double cx = rng.uniform() * side, cy = rng.uniform() * side;
    const double r = side * (0.05 + 0.1 * rng.uniform());
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
  }
  return m;
}

void BM_Edt(benchmark::State& state) {
  const BinaryMask m = blobby_mask(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance_transform(m));
  state.SetItemsProcessed(state.iterations() * m.dims().area());
}

void BM_EdtSerial(benchmark::State& state) {
  const BinaryMask m = blobby_mask(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::euclidean_distance_transform_serial(m));
  state.SetItemsProcessed(state.iterations() * m.dims().area());
}

// One synthetic video with many distractors, tracked once.
struct CostFixture {
  VideoArtifacts video;
  CandidateMasks masks;
  MatchProblem problem;

  explicit CostFixture(int distractors)
      : video([&] {
          RandomSceneOptions opt;
          opt.dims = {128, 128};
          opt.length = 12;
          opt.n_objects = 8;
          opt.min_size = 12;
          opt.max_size = 20;
          SuiteScene s{random_scene(3, opt, "bench"), {}};
          s.noise.n_distractors = distractors;
          s.noise.boundary_flip_prob = 0.1;
          PipelineConfig cfg;
          cfg.sampling.n_pos = 3;
          cfg.sampling.n_neg = 3;
          cfg.sampling.neg_strategy = NegativeStrategy::OutMask;
          return process_video(s, cfg);
        }()),
        masks(CandidateMasks::from_tracks(video.tracks.tracks, video.gt.video.dims,
                                          static_cast<std::size_t>(video.gt.video.length))) {
    problem.objects = video.points.objects;
    problem.masks = &masks;
    for (const auto& t : video.tracks.tracks) problem.scores.push_back(t.maskness);
    problem.frames.resize(static_cast<std::size_t>(video.gt.video.length));
    std::iota(problem.frames.begin(), problem.frames.end(), 0);
  }
};

void BM_CostGrid(benchmark::State& state) {
  const CostFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_match_costs(f.problem));
}

void BM_CostGridSerial(benchmark::State& state) {
  const CostFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::compute_match_costs_serial(f.problem));
}

void BM_Assignment(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = rows * 4;
  Rng rng(5);
  CostMatrix c(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols; ++k) c(r, k) = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(solve_min_cost_assignment(c));
}

void BM_RleRoundTrip(benchmark::State& state) {
  const BinaryMask m = blobby_mask(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(rle_decode(rle_encode(m)));
}

}  // namespace

BENCHMARK(BM_Edt)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EdtSerial)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CostGrid)->Arg(8)->Arg(56)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CostGridSerial)->Arg(8)->Arg(56)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Assignment)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RleRoundTrip)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
