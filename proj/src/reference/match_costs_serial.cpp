#include "pseudolabel/matcher.hpp"

#include "../detail/match_cost_kernels.hpp"

namespace pseudolabel::reference {

CostBreakdown compute_match_costs_serial(const MatchProblem& problem) {
  CostBreakdown out = detail::make_breakdown(problem);
  for (std::size_t j = 0; j < out.rows; ++j) {
    for (std::size_t r = 0; r < out.cols; ++r) {
      const std::size_t i = j * out.cols + r;
      detail::pair_costs(problem, j, r, out.ann[i], out.cineg[i]);
      out.maskness[i] = 0.0 - problem.scores[r];
    }
  }
  return out;
}

}  // namespace pseudolabel::reference
