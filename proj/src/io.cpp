#include "pseudolabel/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "pseudolabel/error.hpp"

namespace pseudolabel {

// ---------------------------------------------------------------------------
// Writer

namespace {

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write_scalar(const json& j, std::string& out) {
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    out += buf;
  } else {
    out += j.dump();
  }
}

void write_value(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += json(it.key()).dump();
      out += ": ";
      write_value(it.value(), indent + 2, out);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(j.begin(), j.end(), is_scalar)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ", ";
        write_scalar(j[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out += ",\n";
      out += pad;
      write_value(j[i], indent + 2, out);
    }
    out += "\n" + close + "]";
  } else {
    write_scalar(j, out);
  }
}

}  // namespace

std::string dump_json(const json& doc) {
  std::string out;
  write_value(doc, 0, out);
  out += "\n";
  return out;
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SchemaError(file.string(), "", "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw SchemaError(file.string(), "", std::string("invalid JSON: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::PipelineError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::PipelineError, "failed writing " + file.string());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json video_json(const VideoInfo& v) {
  return {{"id", v.id}, {"w", v.dims.width}, {"h", v.dims.height}, {"t", v.length}};
}

json points_json(const std::vector<LabeledPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back({{"x", p.x}, {"y", p.y}, {"label", p.positive() ? "pos" : "neg"}});
  }
  return arr;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void put_stats(json& j, const SoftFrameStats& s) {
  j["fg_prob_sum"] = s.fg_prob_sum;
  j["fg_area"] = s.fg_area;
  j["vol_prob_sum"] = s.vol_prob_sum;
}

json assignments_json(const MatchResult& result) {
  json arr = json::array();
  for (const auto& a : result.assignments) {
    arr.push_back({{"object_id", a.object_id},
                   {"track_id", a.track_id},
                   {"cost_ann", a.cost_ann},
                   {"cost_cineg", a.cost_cineg},
                   {"cost_maskness", a.cost_maskness},
                   {"total", a.total}});
  }
  return arr;
}

template <typename T, typename Key>
std::vector<const T*> sorted_by(const std::vector<T>& items, Key key) {
  std::vector<const T*> out;
  for (const auto& i : items) out.push_back(&i);
  std::stable_sort(out.begin(), out.end(),
                   [&](const T* a, const T* b) { return key(*a) < key(*b); });
  return out;
}

}  // namespace

json to_json(const Rle& rle) {
  return {{"h", rle.dims.height}, {"w", rle.dims.width}, {"counts", rle.counts}};
}

json to_json(const VideoGt& gt) {
  json objects = json::array();
  for (const GtInstance* obj : sorted_by(gt.objects, [](const GtInstance& o) { return o.id; })) {
    json frames = json::array();
    for (std::size_t t = 0; t < obj->frames.size(); ++t) {
      frames.push_back({{"t", t}, {"present", obj->frames[t].present},
                        {"rle", to_json(obj->frames[t].mask)}});
    }
    objects.push_back({{"id", obj->id}, {"category", obj->category}, {"frames", frames}});
  }
  return {{"video", video_json(gt.video)}, {"objects", objects}};
}

json to_json(const PointAnnotationSet& points) {
  json objects = json::array();
  for (const GtObject* obj :
       sorted_by(points.objects, [](const GtObject& o) { return o.object_id; })) {
    json frames = json::array();
    for (std::size_t t = 0; t < obj->frames.size(); ++t) {
      frames.push_back({{"t", t}, {"present", obj->frames[t].present},
                        {"points", points_json(obj->frames[t].points)}});
    }
    objects.push_back({{"id", obj->object_id}, {"category", obj->category}, {"frames", frames}});
  }
  return {{"video", video_json(points.video)}, {"objects", objects}};
}

json to_json(const VideoProposals& proposals) {
  json frames = json::array();
  for (std::size_t t = 0; t < proposals.frames.size(); ++t) {
    json list = json::array();
    for (const auto& p : proposals.frames[t]) {
      json j = {{"rle", to_json(p.mask)}, {"embedding", p.embedding},
                {"confidence", optional_number(p.confidence)}};
      put_stats(j, p.stats);
      list.push_back(std::move(j));
    }
    frames.push_back({{"t", t}, {"proposals", list}});
  }
  return {{"video", video_json(proposals.video)}, {"frames", frames}};
}

json to_json(const VideoTracks& tracks) {
  json list = json::array();
  for (const TrackedProposal* track :
       sorted_by(tracks.tracks, [](const TrackedProposal& t) { return t.track_id; })) {
    json frames = json::array();
    for (std::size_t t = 0; t < track->frames.size(); ++t) {
      if (!track->frames[t]) continue;
      const TrackFrame& f = *track->frames[t];
      json j = {{"t", t}, {"rle", to_json(f.mask)}, {"confidence", optional_number(f.confidence)},
                {"proposal_index", f.proposal_index}};
      put_stats(j, f.stats);
      frames.push_back(std::move(j));
    }
    list.push_back({{"track_id", track->track_id},
                    {"maskness", track->maskness},
                    {"confidence", optional_number(track->confidence)},
                    {"embedding_mean", track->embedding_mean},
                    {"frames", frames}});
  }
  return {{"video", video_json(tracks.video)},
          {"maskness_mode", to_string(tracks.maskness_mode)},
          {"tracks", list}};
}

json to_json(const PseudoLabelSet& pseudo) {
  json objects = json::array();
  for (const PseudoObject* obj :
       sorted_by(pseudo.objects, [](const PseudoObject& o) { return o.id; })) {
    json frames = json::array();
    for (std::size_t t = 0; t < obj->frames.size(); ++t) {
      const auto& m = obj->frames[t];
      frames.push_back({{"t", t}, {"present", m.has_value()},
                        {"rle", to_json(m ? *m : empty_rle(pseudo.video.dims))}});
    }
    objects.push_back({{"id", obj->id}, {"category", obj->category}, {"frames", frames}});
  }
  return {{"video", video_json(pseudo.video)}, {"objects", objects}};
}

json to_json(const MatchWeights& w) {
  return {{"lambda_ann", w.lambda_ann},
          {"lambda_cineg", w.lambda_cineg},
          {"lambda_maskness", w.lambda_maskness}};
}

json to_json(const MatchDocument& match) {
  json j = {{"video", video_json(match.video)},
            {"matching", to_string(match.matching)},
            {"weights", to_json(match.weights)},
            {"score_source", to_string(match.score_source)}};
  if (match.matching == MatchingMode::SpatioTemporal) {
    j["assignments"] = assignments_json(match.result);
  } else {
    json frames = json::array();
    for (const FrameMatch* fm : sorted_by(match.frames, [](const FrameMatch& f) { return f.t; })) {
      frames.push_back({{"t", fm->t}, {"assignments", assignments_json(fm->result)}});
    }
    j["frames"] = frames;
  }
  return j;
}

json to_json(const EvalReport& report) {
  json per_object = json::array();
  for (const auto& o : report.per_object) {
    per_object.push_back({{"video", o.video},
                          {"object_id", o.object_id},
                          {"iou", o.iou},
                          {"selected_best", o.selected_best}});
  }
  return {{"per_object", per_object},
          {"mean_iou", report.mean_iou},
          {"selection_accuracy", report.selection_accuracy},
          {"config", report.config_echo}};
}

json to_json(const SceneConfig& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"shape", to_string(o.shape)},
                       {"width", o.width},
                       {"height", o.height},
                       {"x", o.x},
                       {"y", o.y},
                       {"dx", o.dx},
                       {"dy", o.dy},
                       {"birth_t", o.birth_t},
                       {"death_t", o.death_t},
                       {"category", o.category}});
  }
  return {{"video_id", scene.video_id},
          {"w", scene.dims.width},
          {"h", scene.dims.height},
          {"t", scene.length},
          {"seed", scene.seed},
          {"objects", objects}};
}

json to_json(const ProposalNoiseConfig& n) {
  return {{"morph_radius", n.morph_radius},
          {"boundary_flip_prob", n.boundary_flip_prob},
          {"n_distractors", n.n_distractors},
          {"embedding_dim", n.embedding_dim},
          {"embedding_noise", n.embedding_noise},
          {"soft_fg_level", n.soft_fg_level},
          {"soft_bg_level", n.soft_bg_level},
          {"union_fg_level", n.union_fg_level},
          {"distractor_fg_level", n.distractor_fg_level},
          {"nested_radius", n.nested_radius},
          {"seed", n.seed}};
}

json to_json(const SamplingSpec& s) {
  return {{"n_pos", s.n_pos},
          {"n_neg", s.n_neg},
          {"pos_strategy", to_string(s.pos_strategy)},
          {"neg_strategy", to_string(s.neg_strategy)},
          {"band_threshold", s.band_threshold},
          {"seed", s.seed}};
}

// ---------------------------------------------------------------------------
// Validating parsers

namespace {

// A JSON value together with its location, for error reporting.
class Node {
 public:
  Node(const json& j, std::string path, const std::string& file)
      : j_(j), path_(std::move(path)), file_(file) {}

  [[noreturn]] void fail(const std::string& reason) const {
    throw SchemaError(file_, path_.empty() ? "/" : path_, reason);
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node key(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    const auto it = j_.find(key);
    if (it == j_.end()) fail(std::string("missing key '") + key + "'");
    return Node(*it, path_ + "/" + key, file_);
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  Node at(std::size_t i) const { return Node(j_[i], path_ + "/" + std::to_string(i), file_); }

  bool is_null() const { return j_.is_null(); }

  std::int64_t as_int() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    if (j_.is_number_unsigned() &&
        j_.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail("integer out of range");
    }
    return j_.get<std::int64_t>();
  }

  int as_int(std::int64_t lo, std::int64_t hi) const {
    const std::int64_t v = as_int();
    if (v < lo || v > hi) {
      fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
  }

  std::uint64_t as_uint64() const {
    if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
    const std::int64_t v = as_int();
    if (v < 0) fail("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  double as_double() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double as_double(double lo, double hi) const {
    const double v = as_double();
    if (v < lo || v > hi) fail("value outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  bool as_bool() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }

  std::string as_string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<double> as_doubles() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).as_double();
    return out;
  }

  const std::string& file() const { return file_; }

 private:
  const json& j_;
  std::string path_;
  const std::string& file_;
};

constexpr std::int64_t kMaxDim = 1 << 16;
constexpr double kStatsTolerance = 1e-9;

Node root(const json& doc, const std::string& file) { return Node(doc, "", file); }

VideoInfo parse_video(const Node& n) {
  VideoInfo v;
  v.id = n.key("id").as_string();
  v.dims.width = n.key("w").as_int(1, kMaxDim);
  v.dims.height = n.key("h").as_int(1, kMaxDim);
  v.length = n.key("t").as_int(1, 1 << 20);
  return v;
}

Rle parse_rle(const Node& n, FrameDims dims) {
  Rle rle;
  rle.dims.height = n.key("h").as_int(1, kMaxDim);
  rle.dims.width = n.key("w").as_int(1, kMaxDim);
  if (rle.dims != dims) n.fail("rle dims do not match the video dims");
  const Node counts = n.key("counts");
  const std::size_t size = counts.size();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const Node c = counts.at(i);
    const std::int64_t v = c.as_int();
    if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) c.fail("run length out of range");
    if (i > 0 && v == 0) c.fail("zero-length run after the leading run");
    total += v;
    rle.counts.push_back(static_cast<std::uint32_t>(v));
  }
  if (total != dims.area()) {
    counts.fail("rle length mismatch: counts sum to " + std::to_string(total) + ", expected " +
                std::to_string(dims.area()));
  }
  return rle;
}

SoftFrameStats parse_stats(const Node& n, const Rle& mask) {
  SoftFrameStats s;
  s.fg_prob_sum = n.key("fg_prob_sum").as_double();
  s.fg_area = n.key("fg_area").as_int();
  s.vol_prob_sum = n.key("vol_prob_sum").as_double();
  const double area = static_cast<double>(mask.dims.area());
  const double tol = kStatsTolerance * std::max(1.0, area);
  if (s.fg_prob_sum < 0.0) n.key("fg_prob_sum").fail("must be non-negative");
  if (s.fg_area != rle_area(mask)) n.key("fg_area").fail("fg_area does not match the rle area");
  if (s.fg_prob_sum > static_cast<double>(s.fg_area) + tol) {
    n.key("fg_prob_sum").fail("fg_prob_sum exceeds fg_area");
  }
  if (s.vol_prob_sum + tol < s.fg_prob_sum || s.vol_prob_sum > area + tol) {
    n.key("vol_prob_sum").fail("vol_prob_sum must lie in [fg_prob_sum, w * h]");
  }
  return s;
}

std::optional<double> parse_confidence(const Node& n) {
  if (!n.has("confidence")) return std::nullopt;
  const Node c = n.key("confidence");
  if (c.is_null()) return std::nullopt;
  return c.as_double(0.0, 1.0);
}

// Reads object.frames into an array indexed by t; each t at most once.
template <typename Fn>
void for_each_frame(const Node& frames, int length, Fn&& fn) {
  std::set<int> seen;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Node f = frames.at(i);
    const int t = f.key("t").as_int(0, length - 1);
    if (!seen.insert(t).second) f.key("t").fail("duplicate frame t=" + std::to_string(t));
    fn(f, static_cast<std::size_t>(t));
  }
}

std::vector<LabeledPoint> parse_points(const Node& n, FrameDims dims, int object_id, int t) {
  std::vector<LabeledPoint> out;
  const std::string where =
      " (object " + std::to_string(object_id) + ", frame " + std::to_string(t) + ")";
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node p = n.at(i);
    LabeledPoint lp;
    const Node xn = p.key("x");
    const Node yn = p.key("y");
    const std::int64_t x = xn.as_int();
    const std::int64_t y = yn.as_int();
    if (x < 0 || x >= dims.width) {
      xn.fail("point x=" + std::to_string(x) + " outside [0, " + std::to_string(dims.width) + ")" + where);
    }
    if (y < 0 || y >= dims.height) {
      yn.fail("point y=" + std::to_string(y) + " outside [0, " + std::to_string(dims.height) + ")" + where);
    }
    lp.x = static_cast<int>(x);
    lp.y = static_cast<int>(y);
    const std::string label = p.key("label").as_string();
    if (label == "pos") lp.label = PointLabel::Positive;
    else if (label == "neg") lp.label = PointLabel::Negative;
    else p.key("label").fail("label must be \"pos\" or \"neg\"");
    out.push_back(lp);
  }
  return out;
}

MatchResult parse_assignments(const Node& n) {
  MatchResult result;
  std::set<int> objects, tracks;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node a = n.at(i);
    ObjectAssignment oa;
    oa.object_id = a.key("object_id").as_int(std::numeric_limits<int>::min(), std::numeric_limits<int>::max());
    oa.track_id = a.key("track_id").as_int(0, std::numeric_limits<int>::max());
    oa.cost_ann = a.key("cost_ann").as_double();
    oa.cost_cineg = a.key("cost_cineg").as_double();
    oa.cost_maskness = a.key("cost_maskness").as_double();
    oa.total = a.key("total").as_double();
    if (!objects.insert(oa.object_id).second) a.key("object_id").fail("duplicate object id");
    if (!tracks.insert(oa.track_id).second) a.key("track_id").fail("track assigned twice");
    result.assignments.push_back(oa);
  }
  return result;
}

template <typename T>
void require_unique_id(const Node& n, std::set<int>& seen, int id) {
  if (!seen.insert(id).second) n.fail("duplicate id " + std::to_string(id));
}

constexpr std::int64_t kIntMin = std::numeric_limits<int>::min();
constexpr std::int64_t kIntMax = std::numeric_limits<int>::max();

double opt_double(const Node& n, const char* key, double fallback) {
  return n.has(key) ? n.key(key).as_double() : fallback;
}

int opt_int(const Node& n, const char* key, int fallback, std::int64_t lo = kIntMin,
            std::int64_t hi = kIntMax) {
  return n.has(key) ? n.key(key).as_int(lo, hi) : fallback;
}

std::uint64_t opt_seed(const Node& n, std::uint64_t fallback) {
  return n.has("seed") ? n.key("seed").as_uint64() : fallback;
}

}  // namespace

VideoGt gt_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  VideoGt gt;
  gt.video = parse_video(r.key("video"));
  const Node objects = r.key("objects");
  std::set<int> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Node o = objects.at(i);
    GtInstance inst;
    inst.id = o.key("id").as_int(kIntMin, kIntMax);
    if (!ids.insert(inst.id).second) o.key("id").fail("duplicate object id " + std::to_string(inst.id));
    inst.category = o.key("category").as_int(kIntMin, kIntMax);
    inst.frames.assign(static_cast<std::size_t>(gt.video.length),
                       GtInstanceFrame{false, empty_rle(gt.video.dims)});
    for_each_frame(o.key("frames"), gt.video.length, [&](const Node& f, std::size_t t) {
      GtInstanceFrame frame;
      frame.present = f.key("present").as_bool();
      frame.mask = parse_rle(f.key("rle"), gt.video.dims);
      if (!frame.present && rle_area(frame.mask) > 0) f.key("rle").fail("mask on an absent frame");
      inst.frames[t] = std::move(frame);
    });
    gt.objects.push_back(std::move(inst));
  }
  std::sort(gt.objects.begin(), gt.objects.end(),
            [](const GtInstance& a, const GtInstance& b) { return a.id < b.id; });
  return gt;
}

PointAnnotationSet points_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  PointAnnotationSet set;
  set.video = parse_video(r.key("video"));
  const Node objects = r.key("objects");
  std::set<int> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Node o = objects.at(i);
    GtObject obj;
    obj.object_id = o.key("id").as_int(kIntMin, kIntMax);
    if (!ids.insert(obj.object_id).second) {
      o.key("id").fail("duplicate object id " + std::to_string(obj.object_id));
    }
    obj.category = o.key("category").as_int(kIntMin, kIntMax);
    obj.frames.resize(static_cast<std::size_t>(set.video.length));
    for_each_frame(o.key("frames"), set.video.length, [&](const Node& f, std::size_t t) {
      AnnotatedFrame frame;
      frame.present = f.has("present") ? f.key("present").as_bool() : true;
      frame.points = parse_points(f.key("points"), set.video.dims, obj.object_id,
                                  static_cast<int>(t));
      if (!frame.present && !frame.points.empty()) f.key("points").fail("points on an absent frame");
      obj.frames[t] = std::move(frame);
    });
    set.objects.push_back(std::move(obj));
  }
  std::sort(set.objects.begin(), set.objects.end(),
            [](const GtObject& a, const GtObject& b) { return a.object_id < b.object_id; });
  return set;
}

VideoProposals proposals_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  VideoProposals out;
  out.video = parse_video(r.key("video"));
  out.frames.resize(static_cast<std::size_t>(out.video.length));
  const Node frames = r.key("frames");
  std::vector<char> filled(out.frames.size(), 0);
  std::optional<std::size_t> dim;
  for_each_frame(frames, out.video.length, [&](const Node& f, std::size_t t) {
    filled[t] = 1;
    const Node list = f.key("proposals");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node p = list.at(i);
      FrameProposal fp;
      fp.mask = parse_rle(p.key("rle"), out.video.dims);
      fp.stats = parse_stats(p, fp.mask);
      fp.embedding = p.key("embedding").as_doubles();
      if (!dim) dim = fp.embedding.size();
      if (fp.embedding.size() != *dim) p.key("embedding").fail("embedding size mismatch");
      fp.confidence = parse_confidence(p);
      out.frames[t].push_back(std::move(fp));
    }
  });
  for (std::size_t t = 0; t < filled.size(); ++t) {
    if (!filled[t]) frames.fail("missing frame t=" + std::to_string(t));
  }
  return out;
}

VideoTracks tracks_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  VideoTracks out;
  out.video = parse_video(r.key("video"));
  try {
    out.maskness_mode = parse_maskness_mode(r.key("maskness_mode").as_string());
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    r.key("maskness_mode").fail(e.what());
  }
  const Node tracks = r.key("tracks");
  std::set<int> ids;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const Node n = tracks.at(i);
    TrackedProposal track;
    track.track_id = n.key("track_id").as_int(0, kIntMax);
    if (!ids.insert(track.track_id).second) n.key("track_id").fail("duplicate track id");
    track.maskness = n.key("maskness").as_double(0.0, 1.0);
    track.confidence = parse_confidence(n);
    track.embedding_mean = n.key("embedding_mean").as_doubles();
    track.frames.resize(static_cast<std::size_t>(out.video.length));
    const Node frames = n.key("frames");
    if (frames.size() == 0) frames.fail("track has no frames");
    for_each_frame(frames, out.video.length, [&](const Node& f, std::size_t t) {
      TrackFrame tf;
      tf.mask = parse_rle(f.key("rle"), out.video.dims);
      tf.stats = parse_stats(f, tf.mask);
      tf.confidence = parse_confidence(f);
      tf.proposal_index = opt_int(f, "proposal_index", -1, -1, kIntMax);
      track.frames[t] = std::move(tf);
    });
    out.tracks.push_back(std::move(track));
  }
  std::sort(out.tracks.begin(), out.tracks.end(),
            [](const TrackedProposal& a, const TrackedProposal& b) { return a.track_id < b.track_id; });
  return out;
}

PseudoLabelSet pseudo_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  PseudoLabelSet out;
  out.video = parse_video(r.key("video"));
  const Node objects = r.key("objects");
  std::set<int> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Node o = objects.at(i);
    PseudoObject obj;
    obj.id = o.key("id").as_int(kIntMin, kIntMax);
    if (!ids.insert(obj.id).second) o.key("id").fail("duplicate object id " + std::to_string(obj.id));
    obj.category = o.key("category").as_int(kIntMin, kIntMax);
    obj.frames.resize(static_cast<std::size_t>(out.video.length));
    for_each_frame(o.key("frames"), out.video.length, [&](const Node& f, std::size_t t) {
      const bool present = f.key("present").as_bool();
      Rle mask = parse_rle(f.key("rle"), out.video.dims);
      if (!present && rle_area(mask) > 0) f.key("rle").fail("mask on an absent frame");
      if (present) obj.frames[t] = std::move(mask);
    });
    out.objects.push_back(std::move(obj));
  }
  std::sort(out.objects.begin(), out.objects.end(),
            [](const PseudoObject& a, const PseudoObject& b) { return a.id < b.id; });
  return out;
}

MatchWeights weights_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  MatchWeights w;
  w.lambda_ann = opt_double(r, "lambda_ann", w.lambda_ann);
  w.lambda_cineg = opt_double(r, "lambda_cineg", w.lambda_cineg);
  w.lambda_maskness = opt_double(r, "lambda_maskness", w.lambda_maskness);
  try {
    validate(w);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return w;
}

MatchDocument match_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  MatchDocument out;
  out.video = parse_video(r.key("video"));
  try {
    out.matching = parse_matching_mode(r.key("matching").as_string());
    out.score_source = parse_score_source(r.key("score_source").as_string());
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  const json& weights = doc.at("weights");
  out.weights = weights_from_json(weights, file);
  if (out.matching == MatchingMode::SpatioTemporal) {
    out.result = parse_assignments(r.key("assignments"));
  } else {
    std::set<int> seen;
    const Node frames = r.key("frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const Node f = frames.at(i);
      FrameMatch fm;
      fm.t = f.key("t").as_int(0, out.video.length - 1);
      if (!seen.insert(fm.t).second) f.key("t").fail("duplicate frame");
      fm.result = parse_assignments(f.key("assignments"));
      out.frames.push_back(std::move(fm));
    }
    std::sort(out.frames.begin(), out.frames.end(),
              [](const FrameMatch& a, const FrameMatch& b) { return a.t < b.t; });
  }
  return out;
}

EvalReport report_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  EvalReport out;
  const Node per_object = r.key("per_object");
  for (std::size_t i = 0; i < per_object.size(); ++i) {
    const Node o = per_object.at(i);
    out.per_object.push_back({o.key("video").as_string(),
                              o.key("object_id").as_int(kIntMin, kIntMax),
                              o.key("iou").as_double(0.0, 1.0),
                              o.key("selected_best").as_bool()});
  }
  out.mean_iou = r.key("mean_iou").as_double(0.0, 1.0);
  out.selection_accuracy = r.key("selection_accuracy").as_double(0.0, 1.0);
  r.key("config");
  out.config_echo = doc.at("config");
  return out;
}

SceneConfig scene_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  SceneConfig cfg;
  cfg.video_id = r.key("video_id").as_string();
  cfg.dims.width = r.key("w").as_int(1, kMaxDim);
  cfg.dims.height = r.key("h").as_int(1, kMaxDim);
  cfg.length = r.key("t").as_int(1, 1 << 20);
  cfg.seed = opt_seed(r, 0);
  const Node objects = r.key("objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Node o = objects.at(i);
    SceneObject so;
    try {
      so.shape = parse_shape_kind(o.key("shape").as_string());
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      o.key("shape").fail(e.what());
    }
    so.width = o.key("width").as_int(1, kMaxDim);
    so.height = o.key("height").as_int(1, kMaxDim);
    so.x = o.key("x").as_double();
    so.y = o.key("y").as_double();
    so.dx = opt_double(o, "dx", 0.0);
    so.dy = opt_double(o, "dy", 0.0);
    so.birth_t = opt_int(o, "birth_t", 0, 0, cfg.length - 1);
    so.death_t = opt_int(o, "death_t", cfg.length - 1, so.birth_t, cfg.length - 1);
    so.category = opt_int(o, "category", 1);
    cfg.objects.push_back(so);
  }
  return cfg;
}

ProposalNoiseConfig noise_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  ProposalNoiseConfig n;
  n.morph_radius = opt_int(r, "morph_radius", n.morph_radius, 0, 1 << 10);
  n.boundary_flip_prob = opt_double(r, "boundary_flip_prob", n.boundary_flip_prob);
  n.n_distractors = opt_int(r, "n_distractors", n.n_distractors, 0, 1 << 12);
  n.embedding_dim = opt_int(r, "embedding_dim", n.embedding_dim, 1, 1 << 14);
  n.embedding_noise = opt_double(r, "embedding_noise", n.embedding_noise);
  n.soft_fg_level = opt_double(r, "soft_fg_level", n.soft_fg_level);
  n.soft_bg_level = opt_double(r, "soft_bg_level", n.soft_bg_level);
  n.union_fg_level = opt_double(r, "union_fg_level", n.union_fg_level);
  n.distractor_fg_level = opt_double(r, "distractor_fg_level", n.distractor_fg_level);
  n.nested_radius = opt_int(r, "nested_radius", n.nested_radius, 0, 1 << 10);
  n.seed = opt_seed(r, n.seed);
  try {
    validate(n);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return n;
}

SamplingSpec sampling_from_json(const json& doc, const std::string& file) {
  const Node r = root(doc, file);
  SamplingSpec s;
  s.n_pos = opt_int(r, "n_pos", s.n_pos, 0, 1 << 20);
  s.n_neg = opt_int(r, "n_neg", s.n_neg, 0, 1 << 20);
  try {
    if (r.has("pos_strategy")) s.pos_strategy = parse_positive_strategy(r.key("pos_strategy").as_string());
    if (r.has("neg_strategy")) s.neg_strategy = parse_negative_strategy(r.key("neg_strategy").as_string());
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  s.band_threshold = opt_double(r, "band_threshold", s.band_threshold);
  if (s.band_threshold <= 0.0) r.key("band_threshold").fail("must be positive");
  s.seed = opt_seed(r, s.seed);
  return s;
}

VideoGt load_gt(const std::filesystem::path& file) {
  return gt_from_json(read_json_file(file), file.string());
}
PointAnnotationSet load_points(const std::filesystem::path& file) {
  return points_from_json(read_json_file(file), file.string());
}
VideoProposals load_proposals(const std::filesystem::path& file) {
  return proposals_from_json(read_json_file(file), file.string());
}
VideoTracks load_tracks(const std::filesystem::path& file) {
  return tracks_from_json(read_json_file(file), file.string());
}
PseudoLabelSet load_pseudo(const std::filesystem::path& file) {
  return pseudo_from_json(read_json_file(file), file.string());
}
MatchDocument load_match(const std::filesystem::path& file) {
  return match_from_json(read_json_file(file), file.string());
}
EvalReport load_report(const std::filesystem::path& file) {
  return report_from_json(read_json_file(file), file.string());
}

}  // namespace pseudolabel
