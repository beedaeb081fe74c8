#pragma once

// Shared building blocks of the parallel and serial distance transforms.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pseudolabel/distance_transform.hpp"

namespace pseudolabel::detail {

inline constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::max();

// Squared distance along one column to the nearest zero of that column, or
// kUnreached for columns without any zero.
inline void column_pass(const BinaryMask& mask, int x, std::span<std::int64_t> out) {
  const int w = mask.width();
  const int h = mask.height();
  std::int64_t dist = kUnreached;
  for (int y = 0; y < h; ++y) {
    if (!mask.at(x, y)) dist = 0;
    else if (dist != kUnreached) ++dist;
    out[static_cast<std::size_t>(y) * w + x] = dist;
  }
  dist = kUnreached;
  for (int y = h - 1; y >= 0; --y) {
    auto& cell = out[static_cast<std::size_t>(y) * w + x];
    if (!mask.at(x, y)) dist = 0;
    else if (dist != kUnreached) ++dist;
    if (dist < cell) cell = dist;
  }
  for (int y = 0; y < h; ++y) {
    auto& cell = out[static_cast<std::size_t>(y) * w + x];
    if (cell != kUnreached) cell *= cell;
  }
}

// Exact rational intersection abscissa of two parabolas, kept as num/den.
struct Breakpoint {
  std::int64_t num;
  std::int64_t den;  // > 0, or 0 for -infinity
};

inline bool less_equal(const Breakpoint& a, const Breakpoint& b) {
  if (a.den == 0) return true;
  if (b.den == 0) return false;
  // Magnitudes stay below 4 * (w^2 + h^2) * max(w, h), well inside int64.
  return a.num * b.den <= b.num * a.den;
}

// Lower envelope of parabolas f(q) = (q - v)^2 + g[v] over one row, in place.
// Vertices with g[v] == kUnreached are skipped; the vectors are scratch space.
inline void row_pass(std::span<std::int64_t> row, std::vector<int>& vertices,
                     std::vector<Breakpoint>& breaks, std::vector<std::int64_t>& copy) {
  const int n = static_cast<int>(row.size());
  copy.assign(row.begin(), row.end());
  vertices.clear();
  breaks.clear();
  for (int q = 0; q < n; ++q) {
    if (copy[q] == kUnreached) continue;
    const std::int64_t fq = copy[q] + std::int64_t{q} * q;
    while (!vertices.empty()) {
      const int v = vertices.back();
      const std::int64_t fv = copy[v] + std::int64_t{v} * v;
      const Breakpoint s{fq - fv, 2 * std::int64_t{q - v}};
      if (less_equal(s, breaks.back())) {
        vertices.pop_back();
        breaks.pop_back();
      } else {
        vertices.push_back(q);
        breaks.push_back(s);
        break;
      }
    }
    if (vertices.empty()) {
      vertices.push_back(q);
      breaks.push_back({0, 0});
    }
  }
  if (vertices.empty()) return;
  std::size_t k = 0;
  for (int q = 0; q < n; ++q) {
    // Advance while the next breakpoint is at or left of q.
    while (k + 1 < vertices.size() &&
           less_equal(breaks[k + 1], Breakpoint{std::int64_t{q}, 1})) {
      ++k;
    }
    const std::int64_t dq = q - vertices[k];
    row[q] = dq * dq + copy[vertices[k]];
  }
}

// Distances to the virtual border for masks that contain no zero pixel.
inline DistanceMap border_distances(FrameDims dims) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(dims.area()));
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      const std::int64_t d =
          1 + std::min({x, y, dims.width - 1 - x, dims.height - 1 - y});
      out[static_cast<std::size_t>(y) * dims.width + x] = d * d;
    }
  }
  return DistanceMap(dims, std::move(out));
}

}  // namespace pseudolabel::detail
