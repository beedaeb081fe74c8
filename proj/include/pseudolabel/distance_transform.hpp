#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pseudolabel/mask.hpp"

namespace pseudolabel {

// Euclidean distance from each foreground pixel to the nearest background
// pixel, stored as exact integer squared distances. Background pixels are 0.
// When the input has no background pixel at all, distances are measured to
// the virtual border just outside the grid.
class DistanceMap {
 public:
  DistanceMap() = default;
  DistanceMap(FrameDims dims, std::vector<std::int64_t> squared)
      : dims_(dims), squared_(std::move(squared)) {}

  FrameDims dims() const { return dims_; }
  std::int64_t squared(int x, int y) const { return squared_[index(x, y)]; }
  double value(int x, int y) const { return std::sqrt(static_cast<double>(squared(x, y))); }
  const std::vector<std::int64_t>& squared_values() const { return squared_; }

  bool operator==(const DistanceMap&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(dims_.width) +
           static_cast<std::size_t>(x);
  }

  FrameDims dims_;
  std::vector<std::int64_t> squared_;
};

// Two-pass separable squared-distance transform (column pass, then lower
// envelope of parabolas along rows). Both passes run under OpenMP.
DistanceMap euclidean_distance_transform(const BinaryMask& mask);

// Distance of each pixel to the nearest foreground pixel of `mask`
// (the transform of the inverted mask).
DistanceMap background_distance_transform(const BinaryMask& mask);

namespace reference {

// Single-threaded version of euclidean_distance_transform.
DistanceMap euclidean_distance_transform_serial(const BinaryMask& mask);

}  // namespace reference

}  // namespace pseudolabel
