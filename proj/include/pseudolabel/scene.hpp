#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudolabel/mask.hpp"
#include "pseudolabel/tracker.hpp"
#include "pseudolabel/video.hpp"

namespace pseudolabel {

enum class ShapeKind { Ellipse, Rectangle };

std::string_view to_string(ShapeKind s);
ShapeKind parse_shape_kind(std::string_view s);

struct SceneObject {
  ShapeKind shape = ShapeKind::Ellipse;
  int width = 10;  // pixels
  int height = 10;
  double x = 0.0;  // center at t = 0
  double y = 0.0;
  double dx = 0.0;  // pixels per frame
  double dy = 0.0;
  int birth_t = 0;
  int death_t = 0;  // last frame on which the object exists
  int category = 1;

  bool operator==(const SceneObject&) const = default;
};

struct SceneConfig {
  std::string video_id = "scene";
  FrameDims dims{64, 64};
  int length = 1;
  std::vector<SceneObject> objects;  // later objects occlude earlier ones
  std::uint64_t seed = 0;

  bool operator==(const SceneConfig&) const = default;
};

void validate(const SceneConfig& cfg);

// Rasterizes objects with z-order occlusion. An object is present on frame t
// when t lies in [birth_t, death_t] and some of it is visible; instance masks
// are pairwise disjoint. Throws DegenerateObject for never-visible objects.
VideoGt generate_scene(const SceneConfig& cfg);

struct RandomSceneOptions {
  FrameDims dims{96, 96};
  int length = 6;
  int n_objects = 4;
  int min_size = 16;
  int max_size = 26;
  double max_speed = 1.0;
  bool random_lifetimes = false;
  int rectangle_every = 3;  // every k-th object is a rectangle (0: none)
};

// Objects placed on a jittered grid so they rarely touch; deterministic in seed.
SceneConfig random_scene(std::uint64_t seed, const RandomSceneOptions& options,
                         std::string video_id = "scene");

struct ProposalNoiseConfig {
  // Applied to every non-empty proposal: a random dilation or erosion by
  // morph_radius, then each boundary pixel flips with boundary_flip_prob.
  int morph_radius = 0;
  double boundary_flip_prob = 0.0;
  int n_distractors = 0;  // per frame, cycling the distractor kinds
  int embedding_dim = 32;
  double embedding_noise = 0.05;
  double soft_fg_level = 0.9;
  double soft_bg_level = 0.1;
  // Foreground level of union-of-pairs distractors and of the other kinds.
  double union_fg_level = 0.95;
  double distractor_fg_level = 0.7;
  int nested_radius = 3;  // dilation of nested (superset) distractors
  std::uint64_t seed = 0;

  bool operator==(const ProposalNoiseConfig&) const = default;
};

void validate(const ProposalNoiseConfig& cfg);

enum class DistractorKind { UnionOfPairs, Nested, Shifted, Blob };

inline constexpr int kDistractorKinds = 4;
DistractorKind distractor_kind(int index);

// Where each generated proposal came from: slot k < n_objects is object k's
// near-GT copy (an empty proposal while the object is absent, still carrying
// the slot's embedding), slot
// n_objects + d is distractor d.
struct SyntheticProposals {
  VideoProposals proposals;
  std::vector<std::vector<int>> source_slot;  // [t][r]
  std::vector<std::vector<char>> padding;     // [t][r]
  int n_objects = 0;

  bool is_padding(std::size_t t, std::size_t r) const { return padding[t][r] != 0; }
};

// Per frame: one perturbed copy of each present object, n_distractors
// distractors and empty padding up to R = n_objects + n_distractors, in a
// seeded random order. Each slot keeps a base embedding across frames.
SyntheticProposals generate_proposals(const VideoGt& gt, const ProposalNoiseConfig& cfg);

// Morphological helpers on Euclidean disks.
BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask erode(const BinaryMask& mask, int radius);

// Fraction of non-padding tracks whose proposals all come from one slot.
double track_purity(std::span<const TrackedProposal> tracks, const SyntheticProposals& source);

}  // namespace pseudolabel
