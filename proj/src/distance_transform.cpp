#include "pseudolabel/distance_transform.hpp"

#include "detail/edt_kernels.hpp"

namespace pseudolabel {

DistanceMap euclidean_distance_transform(const BinaryMask& mask) {
  const FrameDims dims = mask.dims();
  if (mask.area() == dims.area()) return detail::border_distances(dims);

  const int w = dims.width;
  const int h = dims.height;
  std::vector<std::int64_t> squared(static_cast<std::size_t>(dims.area()));

#pragma omp parallel for schedule(static)
  for (int x = 0; x < w; ++x) {
    detail::column_pass(mask, x, squared);
  }

#pragma omp parallel
  {
    std::vector<int> vertices;
    std::vector<detail::Breakpoint> breaks;
    std::vector<std::int64_t> copy;
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      std::span<std::int64_t> row(squared.data() + static_cast<std::size_t>(y) * w,
                                  static_cast<std::size_t>(w));
      detail::row_pass(row, vertices, breaks, copy);
    }
  }
  return DistanceMap(dims, std::move(squared));
}

DistanceMap background_distance_transform(const BinaryMask& mask) {
  BinaryMask inverted(mask.dims());
  const auto src = mask.pixels();
  auto dst = inverted.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 1;
  return euclidean_distance_transform(inverted);
}

}  // namespace pseudolabel
