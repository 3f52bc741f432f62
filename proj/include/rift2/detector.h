#pragma once

#include <string_view>
#include <vector>

#include "rift2/image.h"
#include "rift2/loggabor.h"

namespace rift2 {

enum class KeypointKind { kCorner, kEdge };

std::string_view ToString(KeypointKind kind);
KeypointKind KeypointKindFromString(std::string_view s);

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;
  KeypointKind kind = KeypointKind::kCorner;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct FastOptions {
  double threshold = 0.001;
  int max_points = 5000;
  // Points closer than this to any border are discarded.
  int border_margin = 48;
};

// FAST-9 (16-pixel Bresenham circle of radius 3) on the min/max-normalized
// score map. The response of a pixel is the largest threshold at which it
// still passes the segment test; 3x3 non-maximum suppression runs on the
// responses independently of `threshold`, so raising the threshold only ever
// removes points. Output is sorted by response descending, ties by (y, x).
std::vector<Keypoint> DetectFast(const Image& map, const FastOptions& options,
                                 KeypointKind kind = KeypointKind::kCorner);

// Per-pixel FAST response before thresholding; 0 within 3 pixels of the
// border. Exposed for tests.
Image FastResponse(const Image& normalized_map);

struct DetectorConfig {
  double threshold = 0.001;
  int max_points = 5000;
  int patch_size = 96;
  double merge_radius = 2.0;

  void Validate() const;
};

// Corners from the minimum-moment map united with edge points from the
// maximum-moment map. A point within merge_radius of a stronger point of the
// other kind is dropped; the union is capped at max_points by response.
std::vector<Keypoint> DetectKeypoints(const PCField& pc,
                                      const DetectorConfig& config);

}  // namespace rift2
