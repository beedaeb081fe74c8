#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pseudolabel {

// Dense row-major rows x cols cost grid.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  std::span<const double> entries() const { return entries_; }

  bool operator==(const CostMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct Assignment {
  std::vector<std::size_t> mapping;  // mapping[row] = column
  double total_cost = 0.0;

  bool operator==(const Assignment&) const = default;
};

// Sum of entries along `mapping`, accumulated in row order.
double assignment_cost(const CostMatrix& costs, std::span<const std::size_t> mapping);

// Exact minimum-cost injective row -> column assignment for rows <= cols
// (shortest augmenting paths with dual potentials). Among optimal mappings
// (costs within a relative 1e-10 tie tolerance) the lexicographically
// smallest is returned.
Assignment solve_min_cost_assignment(const CostMatrix& costs);

// Exhaustive enumeration with the same tie-break; cols <= 8.
Assignment brute_force_assignment(const CostMatrix& costs);

inline constexpr std::size_t kBruteForceMaxCols = 8;

}  // namespace pseudolabel
