#pragma once

// Per-entry cost evaluation shared by the parallel and serial grid builders.

#include <cstddef>

#include "pseudolabel/matcher.hpp"

namespace pseudolabel::detail {

inline void pair_costs(const MatchProblem& p, std::size_t j, std::size_t r, double& ann,
                       double& cineg) {
  std::int64_t mismatches = 0;
  std::int64_t covered = 0;
  const GtObject& obj = p.objects[j];
  for (const int t : p.frames) {
    const auto ts = static_cast<std::size_t>(t);
    if (ts >= obj.frames.size() || !obj.frames[ts].present) continue;
    for (const LabeledPoint& pt : obj.frames[ts].points) {
      if (p.masks->at(r, ts, pt.x, pt.y) != pt.positive()) ++mismatches;
    }
    for (std::size_t k = 0; k < p.objects.size(); ++k) {
      if (k == j || ts >= p.objects[k].frames.size()) continue;
      for (const LabeledPoint& pt : p.objects[k].frames[ts].points) {
        if (pt.positive() && p.masks->at(r, ts, pt.x, pt.y)) ++covered;
      }
    }
  }
  ann = static_cast<double>(mismatches);
  cineg = static_cast<double>(covered);
}

inline CostBreakdown make_breakdown(const MatchProblem& p) {
  CostBreakdown out;
  out.rows = p.objects.size();
  out.cols = p.masks->candidates();
  out.ann.assign(out.rows * out.cols, 0.0);
  out.cineg.assign(out.rows * out.cols, 0.0);
  out.maskness.assign(out.rows * out.cols, 0.0);
  return out;
}

}  // namespace pseudolabel::detail
