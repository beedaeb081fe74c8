#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pseudolabel {

// Frame size in pixels. Points are (x, y) with x the column in [0, width)
// and y the row in [0, height).
struct FrameDims {
  int width = 0;
  int height = 0;

  std::int64_t area() const { return std::int64_t{width} * height; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  auto operator<=>(const FrameDims&) const = default;
};

// Throws InvalidArgument unless width >= 1 and height >= 1.
void validate(FrameDims dims);

class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(FrameDims dims, bool fill = false);

  FrameDims dims() const { return dims_; }
  int width() const { return dims_.width; }
  int height() const { return dims_.height; }

  bool at(int x, int y) const { return pixels_[index(x, y)] != 0; }
  void set(int x, int y, bool value) { pixels_[index(x, y)] = value ? 1 : 0; }

  // Row-major storage, one byte per pixel.
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::int64_t area() const;
  bool empty() const { return area() == 0; }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(dims_.width) +
           static_cast<std::size_t>(x);
  }

  FrameDims dims_;
  std::vector<std::uint8_t> pixels_;
};

// Uncompressed column-major run lengths (flat index x * height + y),
// alternating zero-runs and one-runs, starting with a possibly empty zero-run.
struct Rle {
  FrameDims dims;
  std::vector<std::uint32_t> counts;

  bool operator==(const Rle&) const = default;
};

// Throws MalformedRle when the counts do not describe a width x height mask.
void validate(const Rle& rle);

Rle rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const Rle& rle);
Rle empty_rle(FrameDims dims);
std::int64_t rle_area(const Rle& rle);

// O(log runs) pixel lookup without decoding.
class RleIndex {
 public:
  explicit RleIndex(const Rle& rle);

  FrameDims dims() const { return dims_; }
  bool at(int x, int y) const;

 private:
  FrameDims dims_;
  std::vector<std::int64_t> run_ends_;
};

struct SoftFrameStats {
  double fg_prob_sum = 0.0;
  std::int64_t fg_area = 0;
  double vol_prob_sum = 0.0;

  bool operator==(const SoftFrameStats&) const = default;
};

struct BinarizedFrame {
  BinaryMask mask;
  SoftFrameStats stats;
};

inline constexpr double kDefaultBinarizeThreshold = 0.5;

// `soft` is row-major with dims.area() sigmoid probabilities.
BinarizedFrame binarize(std::span<const double> soft, FrameDims dims,
                        double threshold = kDefaultBinarizeThreshold);

enum class MasknessMode {
  ForegroundMean,  // mean soft probability inside the binarized mask
  VolumeMean,      // mean soft probability over the whole H x W x T volume
};

double maskness(std::span<const SoftFrameStats> frames, FrameDims dims,
                MasknessMode mode = MasknessMode::ForegroundMean);

struct Overlap {
  std::int64_t intersection = 0;
  std::int64_t union_area = 0;

  // 1.0 when both masks are empty.
  double iou() const {
    return union_area == 0 ? 1.0
                           : static_cast<double>(intersection) / static_cast<double>(union_area);
  }
};

Overlap overlap(const BinaryMask& a, const BinaryMask& b);

// Spatio-temporal IoU: intersections and unions are summed over frames.
double mask_iou(std::span<const BinaryMask> a, std::span<const BinaryMask> b);

struct BoundingBox {
  int x0 = 0, y0 = 0;  // inclusive
  int x1 = 0, y1 = 0;  // exclusive

  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool operator==(const BoundingBox&) const = default;
};

std::optional<BoundingBox> bounding_box(const BinaryMask& mask);

}  // namespace pseudolabel
