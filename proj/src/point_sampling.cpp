#include "pseudolabel/point_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "pseudolabel/distance_transform.hpp"
#include "pseudolabel/error.hpp"

namespace pseudolabel {

namespace {

constexpr std::uint64_t kPositiveSalt = 0x706f73;  // "pos"
constexpr std::uint64_t kNegativeSalt = 0x6e6567;  // "neg"

std::vector<double> cumulative_of(const std::vector<double>& weights,
                                  const std::vector<char>& removed) {
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!removed[i]) acc += weights[i];
    cumulative[i] = acc;
  }
  return cumulative;
}

std::vector<LabeledPoint> label(const std::vector<Pixel>& pixels, PointLabel l) {
  std::vector<LabeledPoint> out;
  out.reserve(pixels.size());
  for (const auto& p : pixels) out.push_back({p.x, p.y, l});
  return out;
}

}  // namespace

std::string_view to_string(PositiveStrategy s) {
  switch (s) {
    case PositiveStrategy::Random: return "random";
    case PositiveStrategy::DistanceTransform: return "distance-transform";
  }
  return "";
}

std::string_view to_string(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::InBox: return "in-box";
    case NegativeStrategy::OutBox200: return "out-box-200";
    case NegativeStrategy::OutMask: return "out-mask";
    case NegativeStrategy::DistanceBand: return "distance-band";
  }
  return "";
}

PositiveStrategy parse_positive_strategy(std::string_view s) {
  if (s == "random") return PositiveStrategy::Random;
  if (s == "distance-transform") return PositiveStrategy::DistanceTransform;
  throw Error(ErrorCode::InvalidArgument, "unknown positive strategy '" + std::string(s) + "'");
}

NegativeStrategy parse_negative_strategy(std::string_view s) {
  if (s == "in-box") return NegativeStrategy::InBox;
  if (s == "out-box-200") return NegativeStrategy::OutBox200;
  if (s == "out-mask") return NegativeStrategy::OutMask;
  if (s == "distance-band") return NegativeStrategy::DistanceBand;
  throw Error(ErrorCode::InvalidArgument, "unknown negative strategy '" + std::string(s) + "'");
}

RegionSampler::RegionSampler(std::vector<Pixel> pixels, std::vector<double> weights)
    : pixels_(std::move(pixels)), weights_(std::move(weights)) {
  if (!weights_.empty() && weights_.size() != pixels_.size()) {
    throw Error(ErrorCode::InvalidArgument, "region weights and pixels differ in size");
  }
}

std::size_t RegionSampler::draw_one(const std::vector<double>& cumulative, Rng& rng) const {
  if (weights_.empty()) return static_cast<std::size_t>(rng.index(pixels_.size()));
  const double target = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<Pixel> RegionSampler::draw(std::size_t n, Rng& rng) const {
  if (n == 0) return {};
  if (pixels_.empty()) throw Error(ErrorCode::EmptyRegion, "sampling region is empty");
  if (n > pixels_.size()) {
    throw Error(ErrorCode::TooManyPoints, "requested " + std::to_string(n) +
                                              " points from a region of " +
                                              std::to_string(pixels_.size()));
  }

  // Draw from the full distribution and reject repeats; this is exactly the
  // renormalized distribution over the remaining pixels. After a long run of
  // rejections fall back to drawing from the remaining pixels directly.
  std::vector<char> removed(pixels_.size(), 0);
  std::vector<double> cumulative;
  if (!weights_.empty()) cumulative = cumulative_of(weights_, removed);
  std::vector<std::size_t> remaining;  // used once rejection gets expensive
  bool direct = false;
  std::vector<Pixel> out;
  out.reserve(n);
  int rejections = 0;
  while (out.size() < n) {
    std::size_t pick;
    if (!direct) {
      pick = draw_one(cumulative, rng);
      if (removed[pick]) {
        if (++rejections > 32) {
          direct = true;
          if (weights_.empty()) {
            for (std::size_t i = 0; i < pixels_.size(); ++i) {
              if (!removed[i]) remaining.push_back(i);
            }
          }
        }
        continue;
      }
    } else if (weights_.empty()) {
      const std::size_t k = static_cast<std::size_t>(rng.index(remaining.size()));
      pick = remaining[k];
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      cumulative = cumulative_of(weights_, removed);
      pick = draw_one(cumulative, rng);
      // Zero-weight pixels sit on flat stretches of the cumulative sum.
      while (removed[pick] && pick + 1 < pixels_.size()) ++pick;
      if (removed[pick]) continue;
    }
    rejections = 0;
    removed[pick] = 1;
    out.push_back(pixels_[pick]);
  }
  return out;
}

RegionSampler positive_region(const BinaryMask& mask, PositiveStrategy strategy) {
  std::vector<Pixel> pixels;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) pixels.push_back({x, y});
    }
  }
  if (strategy == PositiveStrategy::Random || pixels.empty()) return RegionSampler(std::move(pixels));

  const DistanceMap dist = euclidean_distance_transform(mask);
  std::vector<double> weights;
  weights.reserve(pixels.size());
  for (const auto& p : pixels) weights.push_back(dist.value(p.x, p.y));
  return RegionSampler(std::move(pixels), std::move(weights));
}

std::optional<BoundingBox> scaled_box(const BinaryMask& mask, double factor) {
  const auto box = bounding_box(mask);
  if (!box) return std::nullopt;
  const double cx = 0.5 * (box->x0 + box->x1);
  const double cy = 0.5 * (box->y0 + box->y1);
  const double hw = 0.5 * factor * (box->x1 - box->x0);
  const double hh = 0.5 * factor * (box->y1 - box->y0);
  // A pixel belongs to the scaled box when its center (x + 0.5) lies inside.
  BoundingBox out;
  out.x0 = std::max(0, static_cast<int>(std::ceil(cx - hw - 0.5)));
  out.x1 = std::min(mask.width(), static_cast<int>(std::floor(cx + hw - 0.5)) + 1);
  out.y0 = std::max(0, static_cast<int>(std::ceil(cy - hh - 0.5)));
  out.y1 = std::min(mask.height(), static_cast<int>(std::floor(cy + hh - 0.5)) + 1);
  return out;
}

RegionSampler negative_region(const BinaryMask& mask, NegativeStrategy strategy,
                              double band_threshold) {
  std::vector<Pixel> pixels;
  const auto box = bounding_box(mask);
  switch (strategy) {
    case NegativeStrategy::InBox:
      if (!box) break;
      for (int y = box->y0; y < box->y1; ++y) {
        for (int x = box->x0; x < box->x1; ++x) {
          if (!mask.at(x, y)) pixels.push_back({x, y});
        }
      }
      break;
    case NegativeStrategy::OutBox200: {
      if (!box) break;
      const BoundingBox outer = *scaled_box(mask, 2.0);
      for (int y = outer.y0; y < outer.y1; ++y) {
        for (int x = outer.x0; x < outer.x1; ++x) {
          if (!box->contains(x, y)) pixels.push_back({x, y});
        }
      }
      break;
    }
    case NegativeStrategy::OutMask:
      for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
          if (!mask.at(x, y)) pixels.push_back({x, y});
        }
      }
      break;
    case NegativeStrategy::DistanceBand: {
      if (!box) break;
      const DistanceMap dist = background_distance_transform(mask);
      for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
          if (!mask.at(x, y) && dist.value(x, y) <= band_threshold) pixels.push_back({x, y});
        }
      }
      break;
    }
  }
  return RegionSampler(std::move(pixels));
}

std::vector<LabeledPoint> sample_positive(const BinaryMask& mask, const SamplingSpec& spec,
                                          Rng& rng) {
  const RegionSampler region = positive_region(mask, spec.pos_strategy);
  if (region.empty()) throw Error(ErrorCode::EmptyRegion, "mask has no foreground");
  return label(region.draw(static_cast<std::size_t>(spec.n_pos), rng), PointLabel::Positive);
}

std::vector<LabeledPoint> sample_negative(const BinaryMask& mask, const SamplingSpec& spec,
                                          Rng& rng) {
  const RegionSampler region = negative_region(mask, spec.neg_strategy, spec.band_threshold);
  if (region.empty() && spec.n_neg > 0) {
    throw Error(ErrorCode::EmptyRegion, std::string("negative region '") +
                                            std::string(to_string(spec.neg_strategy)) +
                                            "' is empty");
  }
  return label(region.draw(static_cast<std::size_t>(spec.n_neg), rng), PointLabel::Negative);
}

std::vector<LabeledPoint> sample_positive(const BinaryMask& mask, const SamplingSpec& spec) {
  Rng rng(splitmix64(spec.seed ^ kPositiveSalt));
  return sample_positive(mask, spec, rng);
}

std::vector<LabeledPoint> sample_negative(const BinaryMask& mask, const SamplingSpec& spec) {
  Rng rng(splitmix64(spec.seed ^ kNegativeSalt));
  return sample_negative(mask, spec, rng);
}

PointAnnotationSet synthesize_annotations(const VideoGt& gt, const SamplingSpec& spec,
                                          std::optional<NegativeStrategy> fallback) {
  if (spec.n_pos < 0 || spec.n_neg < 0 || spec.n_pos + spec.n_neg < 1) {
    throw Error(ErrorCode::InvalidArgument, "sampling needs n_pos + n_neg >= 1");
  }
  PointAnnotationSet out;
  out.video = gt.video;
  struct Cell {
    std::size_t object;
    std::size_t t;
  };
  std::vector<Cell> cells;
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    const auto& obj = gt.objects[j];
    GtObject ann;
    ann.object_id = obj.id;
    ann.category = obj.category;
    ann.frames.resize(obj.frames.size());
    for (std::size_t t = 0; t < obj.frames.size(); ++t) {
      ann.frames[t].present = obj.frames[t].present;
      if (obj.frames[t].present) cells.push_back({j, t});
    }
    out.objects.push_back(std::move(ann));
  }

  std::vector<std::exception_ptr> errors(cells.size());
  const auto n_cells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < n_cells; ++c) {
    const Cell cell = cells[static_cast<std::size_t>(c)];
    const auto& obj = gt.objects[cell.object];
    const auto t = static_cast<std::int64_t>(cell.t);
    try {
      const BinaryMask mask = rle_decode(obj.frames[cell.t].mask);
      Rng pos_rng(sub_seed(spec.seed, gt.video.id, obj.id, t, kPositiveSalt));
      Rng neg_rng(sub_seed(spec.seed, gt.video.id, obj.id, t, kNegativeSalt));
      auto points = sample_positive(mask, spec, pos_rng);
      std::vector<LabeledPoint> negatives;
      try {
        negatives = sample_negative(mask, spec, neg_rng);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyRegion || !fallback) throw;
        SamplingSpec retry = spec;
        retry.neg_strategy = *fallback;
        negatives = sample_negative(mask, retry, neg_rng);
      }
      points.insert(points.end(), negatives.begin(), negatives.end());
      out.objects[cell.object].frames[cell.t].points = std::move(points);
    } catch (const Error& e) {
      errors[static_cast<std::size_t>(c)] = std::make_exception_ptr(
          Error(e.code(), "object " + std::to_string(obj.id) + " frame " + std::to_string(t) +
                              ": " + e.what()));
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace pseudolabel
