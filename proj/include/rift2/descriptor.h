#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rift2/detector.h"
#include "rift2/mim.h"

namespace rift2 {

enum class DescriptorMode : std::uint8_t { kRift2 = 0, kRing = 1, kPlain = 2 };

std::string_view ToString(DescriptorMode mode);

struct Descriptor {
  std::vector<float> vector;
  std::uint32_t keypoint_id = 0;
  // Dominant index (rift2), initial ring layer (ring) or 1 (plain).
  std::uint8_t variant = 1;
  DescriptorMode mode = DescriptorMode::kPlain;
};

struct DescriptorConfig {
  int patch_size = 96;
  int grid = 6;
  double dominant_ratio = 0.8;
  // Rotate the sampling grid by (s - 1) * pi / n_orient for dominant index s.
  bool rotate_patch = true;
  bool weight_by_amplitude = false;

  void Validate() const;
};

struct DescribeStats {
  std::size_t keypoints_in = 0;
  std::size_t keypoints_kept = 0;
  std::size_t keypoints_skipped = 0;
  std::size_t descriptors = 0;
};

// size x size grid centered on the keypoint and rotated by `angle`, sampled
// nearest-neighbor (indices are categorical). Grid offsets are
// (j - (size - 1) / 2, i - (size - 1) / 2), so for an integer keypoint and
// angle 0 the patch is the crop starting at (x - size/2 + 1, y - size/2 + 1).
// Returns nullopt when any sample falls outside the map.
std::optional<IndexMap> ExtractPatch(const IndexMap& mim, const Keypoint& kp,
                                     int size, double angle);

// Row-major grid x grid cells, n_orient bins per cell, L2-normalized. Returns
// nullopt for an all-zero histogram.
std::optional<std::vector<float>> Encode(const IndexMap& patch, int grid,
                                         bool weight_by_amplitude = false);

// One or two descriptors per keypoint, recoded by the patch's dominant
// indices. With rotate_patch, the patch for dominant index s is rotated by
// (s - 1) * pi / n_orient. It is cropped from the map resampled once per
// quantized angle, so its samples sit within half a pixel of ExtractPatch's
// grid; ExtractPatch decides which keypoints are kept.
std::vector<Descriptor> DescribeRift2(const IndexMap& mim,
                                      const std::vector<Keypoint>& keypoints,
                                      const DescriptorConfig& config,
                                      DescribeStats* stats = nullptr);

// n_orient descriptors per keypoint, one per initial ring layer, without any
// spatial rotation.
std::vector<Descriptor> DescribeRing(const IndexMap& mim,
                                     const std::vector<Keypoint>& keypoints,
                                     const DescriptorConfig& config,
                                     DescribeStats* stats = nullptr);

// One unshifted descriptor per keypoint (the target side of ring matching).
std::vector<Descriptor> DescribePlain(const IndexMap& mim,
                                      const std::vector<Keypoint>& keypoints,
                                      const DescriptorConfig& config,
                                      DescribeStats* stats = nullptr);

}  // namespace rift2
