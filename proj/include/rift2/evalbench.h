#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rift2/config.h"
#include "rift2/detector.h"
#include "rift2/image.h"
#include "rift2/matcher.h"
#include "rift2/pipeline.h"

namespace rift2 {

struct EvalReport {
  std::size_t n_correct = 0;
  // RMSE of the correct residuals, capped at rmse_cap; empty when there are
  // no correct matches (rendered as infinity).
  std::optional<double> rmse;
  bool success = false;
  std::size_t n_matches_total = 0;
  double residual_threshold = 3.0;
  StageTimings timings;
  std::size_t ref_descriptors = 0;
  std::size_t tgt_descriptors = 0;
};

// A match is correct when |gt(ref point) - tgt point| < residual_threshold.
// Throws IntegrityError for keypoint ids that do not resolve.
EvalReport Evaluate(const MatchSet& matches,
                    const std::vector<Keypoint>& ref_keypoints,
                    const std::vector<Keypoint>& tgt_keypoints,
                    const RigidTransform& gt, const EvalConfig& config);

// Indices into matches.pairs of the correct matches.
std::vector<std::size_t> CorrectMatchIndices(
    const MatchSet& matches, const std::vector<Keypoint>& ref_keypoints,
    const std::vector<Keypoint>& tgt_keypoints, const RigidTransform& gt,
    double residual_threshold);

// One evaluation pair. Images are read from the paths unless supplied in
// memory. gt maps the reference frame onto the target frame.
struct DatasetPair {
  std::string name;
  std::filesystem::path ref_path;
  std::filesystem::path tgt_path;
  std::optional<Image> ref_image;
  std::optional<Image> tgt_image;
  RigidTransform gt;
};

struct PairOutcome {
  std::string name;
  EvalReport report;
  // Set when the pair could not be loaded or processed.
  std::optional<std::string> error;
};

struct DatasetSummary {
  MatchMode mode = MatchMode::kRift2;
  std::size_t pairs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;  // percent
  double mean_n = 0.0;
  double mean_n_success = 0.0;  // 0 when nothing succeeded
  // Failed pairs contribute rmse_cap.
  double mean_rmse = 0.0;
  double mean_seconds = 0.0;
  std::vector<PairOutcome> per_pair;
};

// Runs the whole pipeline on every pair. Pairs that cannot be read are
// reported as failures with an error message and the run continues.
DatasetSummary DatasetEval(const std::vector<DatasetPair>& pairs,
                           MatchMode mode, const Config& config);

struct ModeBench {
  double describe_seconds = 0.0;
  double match_seconds = 0.0;
  std::size_t ref_descriptors = 0;
  std::size_t tgt_descriptors = 0;
  std::uint64_t distance_evals = 0;
  // Present when a ground truth was supplied.
  std::optional<EvalReport> eval;

  double Seconds() const { return describe_seconds + match_seconds; }
};

struct BenchReport {
  std::size_t ref_keypoints = 0;
  std::size_t tgt_keypoints = 0;
  double detect_seconds = 0.0;
  ModeBench ring;
  ModeBench rift2;
  // |tgt keypoints| * |ref keypoints|: one descriptor per keypoint per side.
  std::uint64_t distance_evals_plain = 0;

  double Speedup() const;
  // n_orient * ref keypoints / rift2 reference descriptors.
  double DescriptorReduction(int n_orient) const;
};

// Detects once per image, then times description + matching for the ring
// baseline and for rift2 on identical keypoints, sequentially.
BenchReport Benchmark(const Image& ref, const Image& tgt, const Config& config,
                      const std::optional<RigidTransform>& gt = std::nullopt);

// Same, on already extracted features.
BenchReport Benchmark(const ImageFeatures& ref, const ImageFeatures& tgt,
                      const Config& config,
                      const std::optional<RigidTransform>& gt = std::nullopt);

}  // namespace rift2
