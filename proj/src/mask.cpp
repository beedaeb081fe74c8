#include "pseudolabel/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pseudolabel/error.hpp"

namespace pseudolabel {

void validate(FrameDims dims) {
  if (dims.width < 1 || dims.height < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dims must be positive, got " +
                                                std::to_string(dims.width) + "x" +
                                                std::to_string(dims.height));
  }
}

BinaryMask::BinaryMask(FrameDims dims, bool fill)
    : dims_(dims), pixels_(static_cast<std::size_t>(dims.area()), fill ? 1 : 0) {
  validate(dims);
}

std::int64_t BinaryMask::area() const {
  return std::count_if(pixels_.begin(), pixels_.end(), [](std::uint8_t p) { return p != 0; });
}

void validate(const Rle& rle) {
  if (rle.dims.width < 1 || rle.dims.height < 1) {
    throw Error(ErrorCode::MalformedRle, "rle dims must be positive");
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i > 0 && rle.counts[i] == 0) {
      throw Error(ErrorCode::MalformedRle,
                  "rle count " + std::to_string(i) + " is zero (only the leading run may be)");
    }
    total += rle.counts[i];
  }
  if (total != rle.dims.area()) {
    throw Error(ErrorCode::MalformedRle, "rle length mismatch: counts sum to " +
                                             std::to_string(total) + ", expected " +
                                             std::to_string(rle.dims.area()));
  }
}

Rle rle_encode(const BinaryMask& mask) {
  Rle rle{mask.dims(), {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      const std::uint8_t value = mask.at(x, y) ? 1 : 0;
      if (value != current) {
        rle.counts.push_back(run);
        run = 0;
        current = value;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const Rle& rle) {
  validate(rle);
  BinaryMask mask(rle.dims);
  const int h = rle.dims.height;
  std::int64_t flat = 0;
  bool value = false;
  for (const std::uint32_t count : rle.counts) {
    if (value) {
      for (std::int64_t k = flat; k < flat + count; ++k) {
        mask.set(static_cast<int>(k / h), static_cast<int>(k % h), true);
      }
    }
    flat += count;
    value = !value;
  }
  return mask;
}

Rle empty_rle(FrameDims dims) {
  validate(dims);
  return Rle{dims, {static_cast<std::uint32_t>(dims.area())}};
}

std::int64_t rle_area(const Rle& rle) {
  std::int64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

RleIndex::RleIndex(const Rle& rle) : dims_(rle.dims) {
  validate(rle);
  run_ends_.reserve(rle.counts.size());
  std::int64_t end = 0;
  for (const std::uint32_t count : rle.counts) {
    end += count;
    run_ends_.push_back(end);
  }
}

bool RleIndex::at(int x, int y) const {
  const std::int64_t flat = std::int64_t{x} * dims_.height + y;
  // First run whose end lies beyond flat; odd runs are foreground.
  const auto it = std::upper_bound(run_ends_.begin(), run_ends_.end(), flat);
  return ((it - run_ends_.begin()) & 1) != 0;
}

BinarizedFrame binarize(std::span<const double> soft, FrameDims dims, double threshold) {
  validate(dims);
  if (static_cast<std::int64_t>(soft.size()) != dims.area()) {
    throw Error(ErrorCode::DimsMismatch, "soft grid has " + std::to_string(soft.size()) +
                                             " values, expected " + std::to_string(dims.area()));
  }
  BinarizedFrame out{BinaryMask(dims), {}};
  auto pixels = out.mask.pixels();
  for (std::size_t i = 0; i < soft.size(); ++i) {
    const double p = soft[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "soft value outside [0, 1] at index " +
                                                  std::to_string(i));
    }
    out.stats.vol_prob_sum += p;
    if (p >= threshold) {
      pixels[i] = 1;
      out.stats.fg_prob_sum += p;
      ++out.stats.fg_area;
    }
  }
  return out;
}

double maskness(std::span<const SoftFrameStats> frames, FrameDims dims, MasknessMode mode) {
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "maskness needs at least one frame");
  if (mode == MasknessMode::ForegroundMean) {
    double prob = 0.0;
    std::int64_t area = 0;
    for (const auto& f : frames) {
      prob += f.fg_prob_sum;
      area += f.fg_area;
    }
    return area == 0 ? 0.0 : prob / static_cast<double>(area);
  }
  validate(dims);
  double prob = 0.0;
  for (const auto& f : frames) prob += f.vol_prob_sum;
  return prob / (static_cast<double>(dims.area()) * static_cast<double>(frames.size()));
}

Overlap overlap(const BinaryMask& a, const BinaryMask& b) {
  if (a.dims() != b.dims()) throw Error(ErrorCode::DimsMismatch, "mask dims differ");
  Overlap o;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    o.intersection += (pa[i] & pb[i]);
    o.union_area += (pa[i] | pb[i]);
  }
  return o;
}

double mask_iou(std::span<const BinaryMask> a, std::span<const BinaryMask> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimsMismatch, "mask sequences differ in length");
  }
  Overlap total;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Overlap o = overlap(a[t], b[t]);
    total.intersection += o.intersection;
    total.union_area += o.union_area;
  }
  return total.iou();
}

std::optional<BoundingBox> bounding_box(const BinaryMask& mask) {
  BoundingBox box{mask.width(), mask.height(), 0, 0};
  bool any = false;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      any = true;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x + 1);
      box.y1 = std::max(box.y1, y + 1);
    }
  }
  if (!any) return std::nullopt;
  return box;
}

}  // namespace pseudolabel
