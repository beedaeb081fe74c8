#include "pseudolabel/evaluation.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "pseudolabel/error.hpp"

namespace pseudolabel {

namespace {

// Exact three-way comparison of two IoU fractions.
int compare_iou(const Overlap& a, const Overlap& b) {
  const auto num_a = a.union_area == 0 ? 1 : a.intersection;
  const auto den_a = a.union_area == 0 ? 1 : a.union_area;
  const auto num_b = b.union_area == 0 ? 1 : b.intersection;
  const auto den_b = b.union_area == 0 ? 1 : b.union_area;
  const auto lhs = num_a * den_b;
  const auto rhs = num_b * den_a;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

void accumulate(Overlap& total, const Overlap& o) {
  total.intersection += o.intersection;
  total.union_area += o.union_area;
}

std::map<int, std::size_t> index_by_track_id(std::span<const TrackedProposal> tracks) {
  std::map<int, std::size_t> out;
  for (std::size_t r = 0; r < tracks.size(); ++r) out[tracks[r].track_id] = r;
  return out;
}

std::map<int, std::size_t> index_by_object_id(const VideoGt& gt) {
  std::map<int, std::size_t> out;
  for (std::size_t j = 0; j < gt.objects.size(); ++j) out[gt.objects[j].id] = j;
  return out;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

IouSummary pseudo_label_iou(const PseudoLabelSet& pseudo, const VideoGt& gt) {
  std::map<int, const PseudoObject*> by_id;
  const auto gt_ids = index_by_object_id(gt);
  for (const auto& p : pseudo.objects) {
    if (!gt_ids.count(p.id)) {
      throw Error(ErrorCode::UnknownObject,
                  "pseudo object " + std::to_string(p.id) + " is not in the ground truth");
    }
    by_id[p.id] = &p;
  }
  IouSummary out;
  const FrameDims dims = gt.video.dims;
  double sum = 0.0;
  for (const auto& obj : gt.objects) {
    const auto it = by_id.find(obj.id);
    const PseudoObject* p = it == by_id.end() ? nullptr : it->second;
    Overlap total;
    for (std::size_t t = 0; t < obj.frames.size(); ++t) {
      if (!obj.frames[t].present) continue;
      const BinaryMask truth = rle_decode(obj.frames[t].mask);
      const BinaryMask guess = p && t < p->frames.size() && p->frames[t]
                                   ? rle_decode(*p->frames[t])
                                   : BinaryMask(dims);
      accumulate(total, overlap(truth, guess));
    }
    out.per_object.push_back({obj.id, total.iou()});
    sum += total.iou();
  }
  out.mean_iou = gt.objects.empty() ? 0.0 : sum / static_cast<double>(gt.objects.size());
  return out;
}

std::vector<std::vector<Overlap>> track_overlaps(const VideoGt& gt,
                                                 std::span<const TrackedProposal> tracks) {
  const FrameDims dims = gt.video.dims;
  const auto length = static_cast<std::size_t>(gt.video.length);
  std::vector<std::vector<std::optional<BinaryMask>>> decoded(tracks.size());
  const auto n_tracks = static_cast<std::ptrdiff_t>(tracks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n_tracks; ++r) {
    const auto& track = tracks[static_cast<std::size_t>(r)];
    auto& slots = decoded[static_cast<std::size_t>(r)];
    slots.resize(length);
    for (std::size_t t = 0; t < std::min(length, track.frames.size()); ++t) {
      if (track.frames[t]) slots[t] = rle_decode(track.frames[t]->mask);
    }
  }

  std::vector<std::vector<Overlap>> out(gt.objects.size(), std::vector<Overlap>(tracks.size()));
  const BinaryMask blank(dims);
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    const auto& obj = gt.objects[j];
    for (std::size_t t = 0; t < std::min(length, obj.frames.size()); ++t) {
      if (!obj.frames[t].present) continue;
      const BinaryMask truth = rle_decode(obj.frames[t].mask);
      for (std::size_t r = 0; r < tracks.size(); ++r) {
        accumulate(out[j][r], overlap(truth, decoded[r][t] ? *decoded[r][t] : blank));
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> best_tracks(const VideoGt& gt,
                                                  std::span<const TrackedProposal> tracks) {
  const auto overlaps = track_overlaps(gt, tracks);
  std::vector<std::vector<std::size_t>> out(gt.objects.size());
  for (std::size_t j = 0; j < overlaps.size(); ++j) {
    for (std::size_t r = 0; r < tracks.size(); ++r) {
      if (out[j].empty()) {
        out[j].push_back(r);
        continue;
      }
      const int cmp = compare_iou(overlaps[j][r], overlaps[j][out[j].front()]);
      if (cmp > 0) out[j] = {r};
      else if (cmp == 0) out[j].push_back(r);
    }
  }
  return out;
}

std::vector<bool> selected_best(const MatchResult& result, const VideoGt& gt,
                                std::span<const TrackedProposal> tracks) {
  const auto best = best_tracks(gt, tracks);
  const auto track_index = index_by_track_id(tracks);
  std::map<int, int> assigned;
  for (const auto& a : result.assignments) assigned[a.object_id] = a.track_id;
  std::vector<bool> out(gt.objects.size(), false);
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    const auto it = assigned.find(gt.objects[j].id);
    if (it == assigned.end()) continue;
    const auto r = track_index.find(it->second);
    out[j] = r != track_index.end() && contains(best[j], r->second);
  }
  return out;
}

double selection_accuracy(const MatchResult& result, const VideoGt& gt,
                          std::span<const TrackedProposal> tracks) {
  const auto sel = selected_best(result, gt, tracks);
  if (sel.empty()) return 0.0;
  return static_cast<double>(std::count(sel.begin(), sel.end(), true)) /
         static_cast<double>(sel.size());
}

namespace {

struct FrameTally {
  std::vector<std::size_t> correct;
  std::vector<std::size_t> total;
};

FrameTally tally_per_frame(std::span<const FrameMatch> results, const VideoGt& gt,
                           std::span<const TrackedProposal> tracks) {
  const auto best = best_tracks(gt, tracks);
  const auto object_index = index_by_object_id(gt);
  FrameTally tally{std::vector<std::size_t>(gt.objects.size(), 0),
                   std::vector<std::size_t>(gt.objects.size(), 0)};
  for (const auto& fm : results) {
    for (const auto& a : fm.result.assignments) {
      const auto j = object_index.find(a.object_id);
      if (j == object_index.end()) {
        throw Error(ErrorCode::UnknownObject, "object " + std::to_string(a.object_id) +
                                                  " is not in the ground truth");
      }
      ++tally.total[j->second];
      if (a.track_id >= 0 && contains(best[j->second], static_cast<std::size_t>(a.track_id))) {
        ++tally.correct[j->second];
      }
    }
  }
  return tally;
}

}  // namespace

double frame_selection_accuracy(std::span<const FrameMatch> results, const VideoGt& gt,
                                std::span<const TrackedProposal> tracks) {
  const FrameTally tally = tally_per_frame(results, gt, tracks);
  std::size_t correct = 0, total = 0;
  for (std::size_t j = 0; j < tally.total.size(); ++j) {
    correct += tally.correct[j];
    total += tally.total[j];
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<bool> selected_best_per_frame(std::span<const FrameMatch> results, const VideoGt& gt,
                                          std::span<const TrackedProposal> tracks) {
  const FrameTally tally = tally_per_frame(results, gt, tracks);
  std::vector<bool> out(gt.objects.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = tally.total[j] > 0 && tally.correct[j] == tally.total[j];
  }
  return out;
}

double frame_selection_accuracy(const MatchResult& result, std::span<const GtObject> annotations,
                                const VideoGt& gt, std::span<const TrackedProposal> tracks) {
  const auto sel = selected_best(result, gt, tracks);
  const auto object_index = index_by_object_id(gt);
  std::size_t correct = 0, total = 0;
  for (const auto& obj : annotations) {
    const auto j = object_index.find(obj.object_id);
    if (j == object_index.end()) continue;
    std::size_t frames = 0;
    for (const auto& f : obj.frames) frames += (f.present && !f.points.empty()) ? 1 : 0;
    total += frames;
    if (sel[j->second]) correct += frames;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

void finalize(EvalReport& report) {
  if (report.per_object.empty()) throw Error(ErrorCode::EmptyEval, "no objects to evaluate");
  std::stable_sort(report.per_object.begin(), report.per_object.end(),
                   [](const ObjectEval& a, const ObjectEval& b) {
                     return std::tie(a.video, a.object_id) < std::tie(b.video, b.object_id);
                   });
  double sum = 0.0;
  std::size_t best = 0;
  for (const auto& o : report.per_object) {
    sum += o.iou;
    best += o.selected_best ? 1 : 0;
  }
  const auto n = static_cast<double>(report.per_object.size());
  report.mean_iou = sum / n;
  report.selection_accuracy = static_cast<double>(best) / n;
}

}  // namespace

EvalReport build_report(const PseudoLabelSet& pseudo, const VideoGt& gt,
                        const std::vector<bool>& selected, nlohmann::json config_echo) {
  if (selected.size() != gt.objects.size()) {
    throw Error(ErrorCode::InvalidArgument, "selection flags do not match the object count");
  }
  const IouSummary ious = pseudo_label_iou(pseudo, gt);
  EvalReport report;
  report.config_echo = std::move(config_echo);
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    report.per_object.push_back(
        {gt.video.id, ious.per_object[j].object_id, ious.per_object[j].iou, selected[j]});
  }
  finalize(report);
  return report;
}

EvalReport merge_reports(std::span<const EvalReport> reports, nlohmann::json config_echo) {
  EvalReport out;
  out.config_echo = std::move(config_echo);
  for (const auto& r : reports) {
    out.per_object.insert(out.per_object.end(), r.per_object.begin(), r.per_object.end());
  }
  finalize(out);
  return out;
}

}  // namespace pseudolabel
