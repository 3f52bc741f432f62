#pragma once

#include <vector>

#include "rift2/config.h"
#include "rift2/descriptor.h"
#include "rift2/detector.h"
#include "rift2/image.h"
#include "rift2/matcher.h"
#include "rift2/mim.h"

namespace rift2 {

// Everything the description stage needs from one image.
struct ImageFeatures {
  std::vector<Keypoint> keypoints;
  IndexMap mim;
  double detect_seconds = 0.0;
};

// Phase congruency, keypoint detection and the maximum index map.
ImageFeatures ExtractFeatures(const Image& img, const Config& config);

struct DescribedPair {
  std::vector<Descriptor> ref;
  std::vector<Descriptor> tgt;
  DescribeStats ref_stats;
  DescribeStats tgt_stats;
};

// rift2: both sides get dominant-index descriptors. ring: the reference gets
// n_orient ring descriptors per keypoint, the target one plain descriptor.
DescribedPair DescribePair(const ImageFeatures& ref, const ImageFeatures& tgt,
                           MatchMode mode, const DescriptorConfig& config);

struct StageTimings {
  double detect = 0.0;
  double describe = 0.0;
  double match = 0.0;

  double Total() const { return detect + describe + match; }
};

struct PairResult {
  ImageFeatures ref;
  ImageFeatures tgt;
  MatchSet matches;
  DescribeStats ref_stats;
  DescribeStats tgt_stats;
  StageTimings timings;
};

// Full pipeline on one pair in config.mode. When either side ends up with no
// descriptors the match set is empty.
PairResult MatchPair(const Image& ref, const Image& tgt, const Config& config);

// Monotonic wall clock in seconds.
double NowSeconds();

}  // namespace rift2
