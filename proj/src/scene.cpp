#include "pseudolabel/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pseudolabel/distance_transform.hpp"
#include "pseudolabel/error.hpp"
#include "pseudolabel/rng.hpp"

namespace pseudolabel {

std::string_view to_string(ShapeKind s) {
  return s == ShapeKind::Ellipse ? "ellipse" : "rectangle";
}

ShapeKind parse_shape_kind(std::string_view s) {
  if (s == "ellipse") return ShapeKind::Ellipse;
  if (s == "rectangle") return ShapeKind::Rectangle;
  throw Error(ErrorCode::InvalidArgument, "unknown shape '" + std::string(s) + "'");
}

void validate(const SceneConfig& cfg) {
  validate(cfg.dims);
  if (cfg.length < 1) throw Error(ErrorCode::InvalidArgument, "scene length must be >= 1");
  for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
    const auto& o = cfg.objects[i];
    const std::string where = "scene object " + std::to_string(i) + ": ";
    if (o.width < 1 || o.height < 1) {
      throw Error(ErrorCode::InvalidArgument, where + "size must be positive");
    }
    if (o.birth_t < 0 || o.birth_t > o.death_t || o.death_t >= cfg.length) {
      throw Error(ErrorCode::InvalidArgument, where + "needs 0 <= birth_t <= death_t < length");
    }
    if (!std::isfinite(o.x) || !std::isfinite(o.y) || !std::isfinite(o.dx) ||
        !std::isfinite(o.dy)) {
      throw Error(ErrorCode::InvalidArgument, where + "non-finite position or velocity");
    }
  }
}

namespace {

BinaryMask raster(const SceneObject& o, int t, FrameDims dims) {
  BinaryMask mask(dims);
  const double cx = o.x + o.dx * t;
  const double cy = o.y + o.dy * t;
  if (o.shape == ShapeKind::Rectangle) {
    const auto x0 = static_cast<long>(std::lround(cx - o.width / 2.0));
    const auto y0 = static_cast<long>(std::lround(cy - o.height / 2.0));
    for (long y = std::max(0L, y0); y < std::min<long>(dims.height, y0 + o.height); ++y) {
      for (long x = std::max(0L, x0); x < std::min<long>(dims.width, x0 + o.width); ++x) {
        mask.set(static_cast<int>(x), static_cast<int>(y), true);
      }
    }
    return mask;
  }
  const double a = o.width / 2.0;
  const double b = o.height / 2.0;
  const int x_lo = std::max(0, static_cast<int>(std::floor(cx - a)));
  const int x_hi = std::min(dims.width - 1, static_cast<int>(std::ceil(cx + a)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(cy - b)));
  const int y_hi = std::min(dims.height - 1, static_cast<int>(std::ceil(cy + b)));
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double u = (x - cx) / a;
      const double v = (y - cy) / b;
      if (u * u + v * v <= 1.0) mask.set(x, y, true);
    }
  }
  return mask;
}

bool alive(const SceneObject& o, int t) { return t >= o.birth_t && t <= o.death_t; }

void subtract(BinaryMask& mask, const BinaryMask& other) {
  auto p = mask.pixels();
  const auto q = other.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = p[i] & static_cast<std::uint8_t>(!q[i]);
}

void unite(BinaryMask& mask, const BinaryMask& other) {
  auto p = mask.pixels();
  const auto q = other.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = p[i] | q[i];
}

}  // namespace

VideoGt generate_scene(const SceneConfig& cfg) {
  validate(cfg);
  VideoGt gt;
  gt.video = {cfg.video_id, cfg.dims, cfg.length};
  const std::size_t n = cfg.objects.size();
  gt.objects.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gt.objects[i].id = static_cast<int>(i);
    gt.objects[i].category = cfg.objects[i].category;
    gt.objects[i].frames.resize(static_cast<std::size_t>(cfg.length));
  }
  for (int t = 0; t < cfg.length; ++t) {
    BinaryMask occluder(cfg.dims);
    for (std::size_t k = n; k-- > 0;) {
      const SceneObject& o = cfg.objects[k];
      GtInstanceFrame& frame = gt.objects[k].frames[static_cast<std::size_t>(t)];
      if (!alive(o, t)) {
        frame = {false, empty_rle(cfg.dims)};
        continue;
      }
      BinaryMask mask = raster(o, t, cfg.dims);
      const BinaryMask full = mask;
      subtract(mask, occluder);
      unite(occluder, full);
      frame.present = !mask.empty();
      frame.mask = rle_encode(mask);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool visible = std::any_of(gt.objects[i].frames.begin(), gt.objects[i].frames.end(),
                                     [](const GtInstanceFrame& f) { return f.present; });
    if (!visible) {
      throw Error(ErrorCode::DegenerateObject,
                  "scene object " + std::to_string(i) + " is never visible");
    }
  }
  return gt;
}

SceneConfig random_scene(std::uint64_t seed, const RandomSceneOptions& options,
                         std::string video_id) {
  Rng rng(sub_seed(seed, video_id, -1, -1, 0x7363656e65));
  SceneConfig cfg;
  cfg.video_id = std::move(video_id);
  cfg.dims = options.dims;
  cfg.length = options.length;
  cfg.seed = seed;

  const int n = options.n_objects;
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const int rows = std::max(1, (n + cols - 1) / cols);
  const double cw = static_cast<double>(options.dims.width) / cols;
  const double ch = static_cast<double>(options.dims.height) / rows;
  std::vector<int> cells(static_cast<std::size_t>(cols * rows));
  std::iota(cells.begin(), cells.end(), 0);
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::swap(cells[i - 1], cells[rng.index(i)]);
  }

  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  for (int i = 0; i < n; ++i) {
    SceneObject o;
    const int cell = cells[static_cast<std::size_t>(i)];
    const double cell_x = (cell % cols + 0.5) * cw;
    const double cell_y = (cell / cols + 0.5) * ch;
    const int span = std::max(0, options.max_size - options.min_size);
    o.width = options.min_size + static_cast<int>(rng.index(static_cast<std::uint64_t>(span) + 1));
    o.height = options.min_size + static_cast<int>(rng.index(static_cast<std::uint64_t>(span) + 1));
    o.width = std::max(1, std::min(o.width, static_cast<int>(cw) - 2));
    o.height = std::max(1, std::min(o.height, static_cast<int>(ch) - 2));
    o.shape = options.rectangle_every > 0 && i % options.rectangle_every == options.rectangle_every - 1
                  ? ShapeKind::Rectangle
                  : ShapeKind::Ellipse;
    // Keep the whole trajectory inside the object's own cell.
    const double slack_x = std::max(0.0, (cw - o.width) / 2.0 - 1.0);
    const double slack_y = std::max(0.0, (ch - o.height) / 2.0 - 1.0);
    const double steps = std::max(1, options.length - 1);
    const double vx = std::min(options.max_speed, slack_x / steps);
    const double vy = std::min(options.max_speed, slack_y / steps);
    o.dx = uniform(-vx, vx);
    o.dy = uniform(-vy, vy);
    o.x = cell_x - o.dx * steps / 2.0;
    o.y = cell_y - o.dy * steps / 2.0;
    o.category = 1 + i % 3;
    if (options.random_lifetimes) {
      o.birth_t = static_cast<int>(rng.index(static_cast<std::uint64_t>(options.length + 1) / 2));
      o.death_t = o.birth_t + static_cast<int>(rng.index(
                                  static_cast<std::uint64_t>(options.length - o.birth_t)));
    } else {
      o.birth_t = 0;
      o.death_t = options.length - 1;
    }
    cfg.objects.push_back(o);
  }
  return cfg;
}

void validate(const ProposalNoiseConfig& cfg) {
  if (cfg.morph_radius < 0 || cfg.n_distractors < 0 || cfg.nested_radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "noise radii and counts must be non-negative");
  }
  if (!(cfg.boundary_flip_prob >= 0.0 && cfg.boundary_flip_prob <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "boundary_flip_prob must lie in [0, 1]");
  }
  if (cfg.embedding_dim < 1) throw Error(ErrorCode::InvalidArgument, "embedding_dim must be >= 1");
  if (!(cfg.embedding_noise >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "embedding_noise must be non-negative");
  }
  for (const double fg : {cfg.soft_fg_level, cfg.union_fg_level, cfg.distractor_fg_level}) {
    if (!(fg > 0.5 && fg <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "foreground soft levels must lie in (0.5, 1]");
    }
  }
  if (!(cfg.soft_bg_level >= 0.0 && cfg.soft_bg_level < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "soft_bg_level must lie in [0, 0.5)");
  }
}

DistractorKind distractor_kind(int index) {
  return static_cast<DistractorKind>(index % kDistractorKinds);
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius <= 0 || mask.empty()) return mask;
  const DistanceMap dist = background_distance_transform(mask);
  const std::int64_t r2 = std::int64_t{radius} * radius;
  BinaryMask out(mask.dims());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x, y, dist.squared(x, y) <= r2);
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius <= 0 || mask.empty()) return mask;
  const DistanceMap dist = euclidean_distance_transform(mask);
  const std::int64_t r2 = std::int64_t{radius} * radius;
  BinaryMask out(mask.dims());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x, y, dist.squared(x, y) > r2);
  }
  return out;
}

namespace {

std::vector<std::vector<double>> base_embeddings(std::size_t count, int dim, Rng& rng) {
  std::vector<std::vector<double>> out;
  const auto d = static_cast<std::size_t>(dim);
  while (out.size() < count) {
    std::vector<double> v(d);
    for (double& c : v) c = rng.normal();
    // Orthogonalize against earlier vectors while there is room.
    if (out.size() < d) {
      for (const auto& u : out) {
        const double dot = std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
        for (std::size_t k = 0; k < d; ++k) v[k] -= dot * u[k];
      }
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm < 1e-9) continue;
    for (double& c : v) c /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

BinaryMask flip_boundary(const BinaryMask& mask, double prob, Rng& rng) {
  if (prob <= 0.0) return mask;
  BinaryMask out = mask;
  constexpr int kDx[] = {1, -1, 0, 0};
  constexpr int kDy[] = {0, 0, 1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool boundary = false;
      for (int k = 0; k < 4 && !boundary; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        boundary = mask.dims().contains(nx, ny) && mask.at(nx, ny) != mask.at(x, y);
      }
      if (boundary && rng.bernoulli(prob)) out.set(x, y, !mask.at(x, y));
    }
  }
  return out;
}

BinaryMask shifted(const BinaryMask& mask, int sx, int sy) {
  BinaryMask out(mask.dims());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) && mask.dims().contains(x + sx, y + sy)) out.set(x + sx, y + sy, true);
    }
  }
  return out;
}

SoftFrameStats two_level_stats(const BinaryMask& mask, double fg, double bg) {
  const std::int64_t area = mask.area();
  const std::int64_t rest = mask.dims().area() - area;
  return {static_cast<double>(area) * fg, area,
          static_cast<double>(area) * fg + static_cast<double>(rest) * bg};
}

struct Blob {
  double x, y;
  int w, h;
};

}  // namespace

SyntheticProposals generate_proposals(const VideoGt& gt, const ProposalNoiseConfig& cfg) {
  validate(cfg);
  const FrameDims dims = gt.video.dims;
  const auto length = static_cast<std::size_t>(gt.video.length);
  const std::size_t n_obj = gt.objects.size();
  const auto n_dis = static_cast<std::size_t>(cfg.n_distractors);
  const std::size_t slots = n_obj + n_dis;
  if (slots == 0) throw Error(ErrorCode::InvalidArgument, "no objects and no distractors");

  Rng scene_rng(sub_seed(cfg.seed, gt.video.id, -1, -1, 0x70726f70));
  const auto bases = base_embeddings(slots, cfg.embedding_dim, scene_rng);
  std::vector<Blob> blobs(n_dis);
  for (auto& b : blobs) {
    b.w = std::max(4, dims.width / 6 + static_cast<int>(scene_rng.index(std::max(1, dims.width / 6))));
    b.h = std::max(4, dims.height / 6 + static_cast<int>(scene_rng.index(std::max(1, dims.height / 6))));
    b.x = scene_rng.uniform() * dims.width;
    b.y = scene_rng.uniform() * dims.height;
  }

  SyntheticProposals out;
  out.n_objects = static_cast<int>(n_obj);
  out.proposals.video = gt.video;
  out.proposals.frames.resize(length);
  out.source_slot.resize(length);
  out.padding.resize(length);

  for (std::size_t t = 0; t < length; ++t) {
    Rng rng(sub_seed(cfg.seed, gt.video.id, -2, static_cast<std::int64_t>(t), 0x70726f70));
    std::vector<std::optional<BinaryMask>> truth(n_obj);
    for (std::size_t k = 0; k < n_obj; ++k) {
      if (t < gt.objects[k].frames.size() && gt.objects[k].frames[t].present) {
        truth[k] = rle_decode(gt.objects[k].frames[t].mask);
      }
    }

    std::vector<FrameProposal> proposals(slots);
    std::vector<char> padding(slots, 0);
    for (std::size_t s = 0; s < slots; ++s) {
      BinaryMask mask(dims);
      double fg = cfg.soft_fg_level;
      double confidence = 0.0;
      bool pad = false;
      if (s < n_obj) {
        if (truth[s]) {
          mask = *truth[s];
          if (cfg.morph_radius > 0) {
            mask = rng.bernoulli(0.5) ? dilate(mask, cfg.morph_radius)
                                      : erode(mask, cfg.morph_radius);
          }
          mask = flip_boundary(mask, cfg.boundary_flip_prob, rng);
          confidence = 0.6 + 0.35 * rng.uniform();
        } else {
          pad = true;
        }
      } else {
        const std::size_t d = s - n_obj;
        const DistractorKind kind = distractor_kind(static_cast<int>(d));
        const std::size_t a = n_obj > 0 ? d % n_obj : 0;
        fg = cfg.distractor_fg_level;
        confidence = 0.1 + 0.4 * rng.uniform();
        switch (kind) {
          case DistractorKind::UnionOfPairs:
            fg = cfg.union_fg_level;
            confidence = 0.3 + 0.3 * rng.uniform();
            if (n_obj > 0 && truth[a]) mask = *truth[a];
            if (n_obj > 1 && truth[(a + 1) % n_obj]) {
              BinaryMask other = *truth[(a + 1) % n_obj];
              auto p = mask.pixels();
              const auto q = other.pixels();
              for (std::size_t i = 0; i < p.size(); ++i) p[i] = p[i] | q[i];
            }
            break;
          case DistractorKind::Nested:
            if (n_obj > 0 && truth[a]) mask = dilate(*truth[a], cfg.nested_radius);
            break;
          case DistractorKind::Shifted:
            if (n_obj > 0 && truth[a]) {
              const auto box = bounding_box(*truth[a]);
              const int step = std::max(1, (box->x1 - box->x0) / 2);
              mask = shifted(*truth[a], d % 2 == 0 ? step : -step, 0);
            }
            break;
          case DistractorKind::Blob: {
            const Blob& b = blobs[d];
            SceneObject shape;
            shape.width = b.w;
            shape.height = b.h;
            shape.x = b.x;
            shape.y = b.y;
            mask = raster(shape, 0, dims);
            break;
          }
        }
        if (cfg.morph_radius > 0 && !mask.empty()) {
          mask = rng.bernoulli(0.5) ? dilate(mask, cfg.morph_radius)
                                    : erode(mask, cfg.morph_radius);
        }
        mask = flip_boundary(mask, cfg.boundary_flip_prob, rng);
      }

      FrameProposal& p = proposals[s];
      padding[s] = pad ? 1 : 0;
      p.mask = rle_encode(mask);
      // An empty slot keeps its query embedding, as a model's unused query would.
      p.embedding = bases[s];
      for (double& c : p.embedding) c += cfg.embedding_noise * rng.normal();
      if (pad) {
        p.confidence = 0.0;
        continue;
      }
      p.stats = two_level_stats(mask, fg, cfg.soft_bg_level);
      p.confidence = confidence;
    }

    // Seeded shuffle so that slot order carries no information.
    std::vector<int> order(slots);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = slots; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (const int s : order) {
      out.proposals.frames[t].push_back(std::move(proposals[static_cast<std::size_t>(s)]));
      out.source_slot[t].push_back(s);
      out.padding[t].push_back(padding[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

double track_purity(std::span<const TrackedProposal> tracks, const SyntheticProposals& source) {
  std::size_t counted = 0;
  std::size_t pure = 0;
  for (const auto& track : tracks) {
    int slot = -1;
    bool ok = true;
    bool any = false;
    for (std::size_t t = 0; t < track.frames.size(); ++t) {
      const auto& f = track.frames[t];
      if (!f || f->proposal_index < 0) continue;
      const auto r = static_cast<std::size_t>(f->proposal_index);
      if (source.is_padding(t, r)) continue;
      const int s = source.source_slot[t][r];
      if (!any) slot = s;
      any = true;
      ok = ok && s == slot;
    }
    if (!any) continue;
    ++counted;
    if (ok) ++pure;
  }
  return counted == 0 ? 1.0 : static_cast<double>(pure) / static_cast<double>(counted);
}

}  // namespace pseudolabel
