#include "pseudolabel/distance_transform.hpp"

#include "../detail/edt_kernels.hpp"

namespace pseudolabel::reference {

DistanceMap euclidean_distance_transform_serial(const BinaryMask& mask) {
  const FrameDims dims = mask.dims();
  if (mask.area() == dims.area()) return detail::border_distances(dims);

  const int w = dims.width;
  std::vector<std::int64_t> squared(static_cast<std::size_t>(dims.area()));
  for (int x = 0; x < w; ++x) detail::column_pass(mask, x, squared);

  std::vector<int> vertices;
  std::vector<detail::Breakpoint> breaks;
  std::vector<std::int64_t> copy;
  for (int y = 0; y < dims.height; ++y) {
    std::span<std::int64_t> row(squared.data() + static_cast<std::size_t>(y) * w,
                                static_cast<std::size_t>(w));
    detail::row_pass(row, vertices, breaks, copy);
  }
  return DistanceMap(dims, std::move(squared));
}

}  // namespace pseudolabel::reference
