#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pseudolabel/mask.hpp"
#include "pseudolabel/rng.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

enum class PositiveStrategy {
  Random,             // uniform over the foreground
  DistanceTransform,  // proportional to the distance to the mask boundary
};

enum class NegativeStrategy {
  InBox,         // inside the tight box, outside the mask
  OutBox200,     // outside the tight box, inside the box scaled 2x about its center
  OutMask,       // anywhere outside the mask
  DistanceBand,  // outside the mask, within band_threshold pixels of it
};

std::string_view to_string(PositiveStrategy s);
std::string_view to_string(NegativeStrategy s);
PositiveStrategy parse_positive_strategy(std::string_view s);
NegativeStrategy parse_negative_strategy(std::string_view s);

struct SamplingSpec {
  int n_pos = 1;
  int n_neg = 0;
  PositiveStrategy pos_strategy = PositiveStrategy::Random;
  NegativeStrategy neg_strategy = NegativeStrategy::InBox;
  double band_threshold = 50.0;
  std::uint64_t seed = 0;

  bool operator==(const SamplingSpec&) const = default;
};

struct Pixel {
  int x = 0;
  int y = 0;
  bool operator==(const Pixel&) const = default;
};

// A finite sampling region with optional per-pixel weights. Draws are without
// replacement; weighted draws follow successive sampling (each draw is
// proportional to the weights of the pixels not yet drawn).
class RegionSampler {
 public:
  RegionSampler(std::vector<Pixel> pixels, std::vector<double> weights = {});

  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }
  const std::vector<Pixel>& pixels() const { return pixels_; }
  const std::vector<double>& weights() const { return weights_; }

  // Throws EmptyRegion / TooManyPoints.
  std::vector<Pixel> draw(std::size_t n, Rng& rng) const;

 private:
  std::size_t draw_one(const std::vector<double>& cumulative, Rng& rng) const;

  std::vector<Pixel> pixels_;
  std::vector<double> weights_;  // empty for uniform
};

RegionSampler positive_region(const BinaryMask& mask, PositiveStrategy strategy);
RegionSampler negative_region(const BinaryMask& mask, NegativeStrategy strategy,
                              double band_threshold = 50.0);

// The 2x box scaled about the tight box center, clipped to the frame.
std::optional<BoundingBox> scaled_box(const BinaryMask& mask, double factor = 2.0);

std::vector<LabeledPoint> sample_positive(const BinaryMask& mask, const SamplingSpec& spec);
std::vector<LabeledPoint> sample_negative(const BinaryMask& mask, const SamplingSpec& spec);
std::vector<LabeledPoint> sample_positive(const BinaryMask& mask, const SamplingSpec& spec,
                                          Rng& rng);
std::vector<LabeledPoint> sample_negative(const BinaryMask& mask, const SamplingSpec& spec,
                                          Rng& rng);

// Samples every present frame of every object with per-(video, object, frame)
// sub-seeds, so the result does not depend on evaluation order. When
// `fallback` is set, an empty negative region retries with that strategy
// instead of failing.
PointAnnotationSet synthesize_annotations(const VideoGt& gt, const SamplingSpec& spec,
                                          std::optional<NegativeStrategy> fallback = std::nullopt);

}  // namespace pseudolabel
