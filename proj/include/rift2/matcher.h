#pragma once

#include <cstdint>
#include <vector>

#include "rift2/descriptor.h"

namespace rift2 {

struct Match {
  std::uint32_t ref = 0;
  std::uint32_t tgt = 0;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchSet {
  // One entry per target keypoint, ascending distance (ties by tgt, ref).
  std::vector<Match> pairs;
  DescriptorMode mode = DescriptorMode::kRift2;
  // Descriptor pairs whose distance was evaluated: |tgt| * |ref|.
  std::uint64_t distance_evals = 0;
};

// Brute-force nearest neighbor from target keypoints to reference keypoints.
// The keypoint distance is the minimum Euclidean distance over all
// descriptor-variant pairs; no ratio test and no cross-check. Ties go to the
// smaller reference keypoint id. Candidates are screened with a blocked
// float GEMM and the winner is settled on exact double-precision distances.
MatchSet MatchNearest(const std::vector<Descriptor>& ref_descs,
                      const std::vector<Descriptor>& tgt_descs);

// Exact Euclidean distance accumulated in double.
double DescriptorDistance(const std::vector<float>& a,
                          const std::vector<float>& b);

}  // namespace rift2
