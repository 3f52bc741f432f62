#include "rift2/pipeline.h"

#include <chrono>

#include "rift2/loggabor.h"

namespace rift2 {

double NowSeconds() {
  using Clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

ImageFeatures ExtractFeatures(const Image& img, const Config& config) {
  config.Validate();
  const double start = NowSeconds();
  ImageFeatures features;
  {
    const PCField pc = ComputePCField(img, config.bank);
    features.keypoints = DetectKeypoints(pc, config.detector);
    features.mim = BuildMim(pc.a_o);
  }
  features.detect_seconds = NowSeconds() - start;
  return features;
}

DescribedPair DescribePair(const ImageFeatures& ref, const ImageFeatures& tgt,
                           MatchMode mode, const DescriptorConfig& config) {
  DescribedPair out;
  if (mode == MatchMode::kRift2) {
    out.ref = DescribeRift2(ref.mim, ref.keypoints, config, &out.ref_stats);
    out.tgt = DescribeRift2(tgt.mim, tgt.keypoints, config, &out.tgt_stats);
  } else {
    out.ref = DescribeRing(ref.mim, ref.keypoints, config, &out.ref_stats);
    out.tgt = DescribePlain(tgt.mim, tgt.keypoints, config, &out.tgt_stats);
  }
  return out;
}

PairResult MatchPair(const Image& ref, const Image& tgt, const Config& config) {
  PairResult result;
  result.ref = ExtractFeatures(ref, config);
  result.tgt = ExtractFeatures(tgt, config);
  result.timings.detect = result.ref.detect_seconds + result.tgt.detect_seconds;

  double t = NowSeconds();
  DescribedPair described =
      DescribePair(result.ref, result.tgt, config.mode, config.descriptor);
  result.timings.describe = NowSeconds() - t;
  result.ref_stats = described.ref_stats;
  result.tgt_stats = described.tgt_stats;

  t = NowSeconds();
  if (!described.ref.empty() && !described.tgt.empty()) {
    result.matches = MatchNearest(described.ref, described.tgt);
  }
  result.matches.mode = config.mode == MatchMode::kRift2 ? DescriptorMode::kRift2
                                                         : DescriptorMode::kRing;
  result.timings.match = NowSeconds() - t;
  return result;
}

}  // namespace rift2
