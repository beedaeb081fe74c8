#include "pseudolabel/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pseudolabel/error.hpp"

namespace pseudolabel {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeError, "cost matrix needs " + std::to_string(rows_ * cols_) +
                                           " entries, got " + std::to_string(entries_.size()));
  }
}

double assignment_cost(const CostMatrix& costs, std::span<const std::size_t> mapping) {
  double total = 0.0;
  for (std::size_t r = 0; r < mapping.size(); ++r) total += costs(r, mapping[r]);
  return total;
}

namespace {

void check_solvable(const CostMatrix& costs) {
  if (costs.rows() > costs.cols()) {
    throw Error(ErrorCode::ShapeError, "assignment needs rows <= cols, got " +
                                           std::to_string(costs.rows()) + "x" +
                                           std::to_string(costs.cols()));
  }
  for (const double v : costs.entries()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteCost, "cost matrix has a non-finite entry");
  }
}

double tie_tolerance(const CostMatrix& costs) {
  double max_abs = 0.0;
  for (const double v : costs.entries()) max_abs = std::max(max_abs, std::abs(v));
  return 1e-10 * static_cast<double>(std::max<std::size_t>(costs.rows(), 1)) * max_abs;
}

struct Solution {
  std::vector<std::size_t> mapping;  // indices into the sub-problem's columns
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  double cost = 0.0;
};

// Shortest augmenting path Hungarian method on the sub-matrix selected by
// `rows` x `cols`, O(n^2 m). Column potentials end up <= 0 and are 0 on
// unmatched columns, so (u, v) is optimal for the rectangular dual.
Solution hungarian(const CostMatrix& a, std::span<const std::size_t> rows,
                   std::span<const std::size_t> cols) {
  const std::size_t n = rows.size();
  const std::size_t m = cols.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(rows[i0 - 1], cols[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Solution s;
  s.mapping.assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) s.mapping[owner[j] - 1] = j - 1;
  }
  s.row_potential.assign(u.begin() + 1, u.end());
  s.col_potential.assign(v.begin() + 1, v.end());
  for (std::size_t r = 0; r < n; ++r) s.cost += a(rows[r], cols[s.mapping[r]]);
  return s;
}

}  // namespace

Assignment solve_min_cost_assignment(const CostMatrix& costs) {
  check_solvable(costs);
  const std::size_t n = costs.rows();
  const std::size_t m = costs.cols();
  if (n == 0) return {};

  std::vector<std::size_t> all_rows(n), all_cols(m);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::iota(all_cols.begin(), all_cols.end(), 0);
  const Solution best = hungarian(costs, all_rows, all_cols);
  const double tol = tie_tolerance(costs);

  // Lexicographic tie-break: fix rows in order to the smallest column that
  // still admits an optimal completion. Complementary slackness prunes every
  // column whose reduced cost is not (numerically) zero.
  std::vector<std::size_t> mapping = best.mapping;
  std::vector<char> taken(m, 0);
  double prefix_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < mapping[i]; ++c) {
      if (taken[c]) continue;
      const double reduced = costs(i, c) - best.row_potential[i] - best.col_potential[c];
      if (reduced > tol) continue;

      std::vector<std::size_t> rest_rows, rest_cols;
      for (std::size_t r = i + 1; r < n; ++r) rest_rows.push_back(r);
      for (std::size_t col = 0; col < m; ++col) {
        if (!taken[col] && col != c) rest_cols.push_back(col);
      }
      const Solution rest = hungarian(costs, rest_rows, rest_cols);
      if (prefix_cost + costs(i, c) + rest.cost <= best.cost + tol) {
        mapping[i] = c;
        for (std::size_t k = 0; k < rest_rows.size(); ++k) {
          mapping[rest_rows[k]] = rest_cols[rest.mapping[k]];
        }
        break;
      }
    }
    taken[mapping[i]] = 1;
    prefix_cost += costs(i, mapping[i]);
  }
  return {mapping, assignment_cost(costs, mapping)};
}

Assignment brute_force_assignment(const CostMatrix& costs) {
  if (costs.cols() > kBruteForceMaxCols) {
    throw Error(ErrorCode::TooLarge, "brute force supports at most " +
                                         std::to_string(kBruteForceMaxCols) + " columns");
  }
  check_solvable(costs);
  const std::size_t n = costs.rows();
  const std::size_t m = costs.cols();
  if (n == 0) return {};

  // Enumerate injective mappings in lexicographic order.
  std::vector<std::vector<std::size_t>> mappings;
  std::vector<std::size_t> current;
  std::vector<char> taken(m, 0);
  auto recurse = [&](auto&& self) -> void {
    if (current.size() == n) {
      mappings.push_back(current);
      return;
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (taken[c]) continue;
      taken[c] = 1;
      current.push_back(c);
      self(self);
      current.pop_back();
      taken[c] = 0;
    }
  };
  recurse(recurse);

  double min_cost = std::numeric_limits<double>::infinity();
  for (const auto& mp : mappings) min_cost = std::min(min_cost, assignment_cost(costs, mp));
  const double tol = tie_tolerance(costs);
  for (const auto& mp : mappings) {
    const double c = assignment_cost(costs, mp);
    if (c <= min_cost + tol) return {mp, c};
  }
  return {};  // unreachable
}

}  // namespace pseudolabel
