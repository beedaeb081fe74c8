#pragma once

#include <string>
#include <vector>

#include "pseudolabel/mask.hpp"

namespace pseudolabel {

struct VideoInfo {
  std::string id;
  FrameDims dims;
  int length = 0;  // number of frames T

  bool operator==(const VideoInfo&) const = default;
};

struct GtInstanceFrame {
  bool present = false;
  Rle mask;  // all-zero when not present

  bool operator==(const GtInstanceFrame&) const = default;
};

// Dense ground truth of one object; frames has one entry per t.
struct GtInstance {
  int id = 0;
  int category = 0;
  std::vector<GtInstanceFrame> frames;

  bool operator==(const GtInstance&) const = default;
};

struct VideoGt {
  VideoInfo video;
  std::vector<GtInstance> objects;

  bool operator==(const VideoGt&) const = default;
};

enum class PointLabel { Negative, Positive };

struct LabeledPoint {
  int x = 0;
  int y = 0;
  PointLabel label = PointLabel::Positive;

  bool positive() const { return label == PointLabel::Positive; }
  bool operator==(const LabeledPoint&) const = default;
};

struct AnnotatedFrame {
  bool present = false;
  std::vector<LabeledPoint> points;

  bool operator==(const AnnotatedFrame&) const = default;
};

// A point-annotated video object: per-frame points with labels, presence
// flags and a category label. frames has one entry per t.
struct GtObject {
  int object_id = 0;
  int category = 0;
  std::vector<AnnotatedFrame> frames;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.points.size();
    return n;
  }
  bool operator==(const GtObject&) const = default;
};

struct PointAnnotationSet {
  VideoInfo video;
  std::vector<GtObject> objects;

  bool operator==(const PointAnnotationSet&) const = default;
};

}  // namespace pseudolabel
