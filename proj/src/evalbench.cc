#include "rift2/evalbench.h"

#include <cmath>
#include <iostream>

#include "rift2/error.h"

namespace rift2 {

std::vector<std::size_t> CorrectMatchIndices(
    const MatchSet& matches, const std::vector<Keypoint>& ref_keypoints,
    const std::vector<Keypoint>& tgt_keypoints, const RigidTransform& gt,
    double residual_threshold) {
  std::vector<std::size_t> correct;
  for (std::size_t i = 0; i < matches.pairs.size(); ++i) {
    const Match& m = matches.pairs[i];
    if (m.ref >= ref_keypoints.size() || m.tgt >= tgt_keypoints.size()) {
      throw IntegrityError("match references keypoint (" +
                           std::to_string(m.ref) + ", " +
                           std::to_string(m.tgt) + ") outside the lists");
    }
    const Keypoint& r = ref_keypoints[m.ref];
    const Keypoint& t = tgt_keypoints[m.tgt];
    const Eigen::Vector2d projected = gt(Eigen::Vector2d(r.x, r.y));
    const double residual = (projected - Eigen::Vector2d(t.x, t.y)).norm();
    if (residual < residual_threshold) correct.push_back(i);
  }
  return correct;
}

EvalReport Evaluate(const MatchSet& matches,
                    const std::vector<Keypoint>& ref_keypoints,
                    const std::vector<Keypoint>& tgt_keypoints,
                    const RigidTransform& gt, const EvalConfig& config) {
  config.Validate();
  const std::vector<std::size_t> correct = CorrectMatchIndices(
      matches, ref_keypoints, tgt_keypoints, gt, config.residual_threshold);

  EvalReport report;
  report.residual_threshold = config.residual_threshold;
  report.n_matches_total = matches.pairs.size();
  report.n_correct = correct.size();
  if (!correct.empty()) {
    double sum_sq = 0.0;
    for (const std::size_t i : correct) {
      const Match& m = matches.pairs[i];
      const Keypoint& r = ref_keypoints[m.ref];
      const Keypoint& t = tgt_keypoints[m.tgt];
      sum_sq += (gt(Eigen::Vector2d(r.x, r.y)) - Eigen::Vector2d(t.x, t.y))
                    .squaredNorm();
    }
    report.rmse = std::min(std::sqrt(sum_sq / correct.size()), config.rmse_cap);
  }
  report.success = report.n_correct >=
                   static_cast<std::size_t>(config.success_min_matches);
  return report;
}

DatasetSummary DatasetEval(const std::vector<DatasetPair>& pairs,
                           MatchMode mode, const Config& config) {
  RIFT2_CHECK_PARAM(!pairs.empty(), "dataset has no pairs");
  Config cfg = config;
  cfg.mode = mode;
  cfg.Validate();

  DatasetSummary summary;
  summary.mode = mode;
  summary.pairs = pairs.size();
  // Pairs run one after another; the pipeline stages parallelize internally.
  for (const DatasetPair& pair : pairs) {
    PairOutcome outcome;
    outcome.name = pair.name;
    outcome.report.residual_threshold = cfg.eval.residual_threshold;
    try {
      const Image ref = pair.ref_image ? *pair.ref_image : LoadImage(pair.ref_path);
      const Image tgt = pair.tgt_image ? *pair.tgt_image : LoadImage(pair.tgt_path);
      pair.gt.Validate();
      const PairResult result = MatchPair(ref, tgt, cfg);
      outcome.report = Evaluate(result.matches, result.ref.keypoints,
                                result.tgt.keypoints, pair.gt, cfg.eval);
      outcome.report.timings = result.timings;
      outcome.report.ref_descriptors = result.ref_stats.descriptors;
      outcome.report.tgt_descriptors = result.tgt_stats.descriptors;
    } catch (const std::exception& e) {
      outcome.error = e.what();
      std::cerr << "warning: pair '" << pair.name << "' failed: " << e.what()
                << '\n';
    }
    summary.per_pair.push_back(std::move(outcome));
  }

  double sum_n = 0.0, sum_n_success = 0.0, sum_rmse = 0.0, sum_time = 0.0;
  for (const PairOutcome& o : summary.per_pair) {
    const EvalReport& r = o.report;
    sum_n += static_cast<double>(r.n_correct);
    sum_time += r.timings.Total();
    if (r.success) {
      ++summary.successes;
      sum_n_success += static_cast<double>(r.n_correct);
      sum_rmse += r.rmse.value_or(cfg.eval.rmse_cap);
    } else {
      sum_rmse += cfg.eval.rmse_cap;
    }
  }
  const double n = static_cast<double>(summary.pairs);
  summary.success_rate = 100.0 * static_cast<double>(summary.successes) / n;
  summary.mean_n = sum_n / n;
  summary.mean_n_success =
      summary.successes ? sum_n_success / static_cast<double>(summary.successes)
                        : 0.0;
  summary.mean_rmse = sum_rmse / n;
  summary.mean_seconds = sum_time / n;
  return summary;
}

double BenchReport::Speedup() const {
  const double t = rift2.Seconds();
  return t > 0.0 ? ring.Seconds() / t : 0.0;
}

double BenchReport::DescriptorReduction(int n_orient) const {
  return rift2.ref_descriptors
             ? static_cast<double>(n_orient) * static_cast<double>(ref_keypoints) /
                   static_cast<double>(rift2.ref_descriptors)
             : 0.0;
}

namespace {

ModeBench RunMode(const ImageFeatures& ref, const ImageFeatures& tgt,
                  MatchMode mode, const Config& config,
                  const std::optional<RigidTransform>& gt) {
  ModeBench bench;
  double t = NowSeconds();
  const DescribedPair described =
      DescribePair(ref, tgt, mode, config.descriptor);
  bench.describe_seconds = NowSeconds() - t;
  bench.ref_descriptors = described.ref.size();
  bench.tgt_descriptors = described.tgt.size();

  t = NowSeconds();
  MatchSet matches;
  if (!described.ref.empty() && !described.tgt.empty()) {
    matches = MatchNearest(described.ref, described.tgt);
  }
  bench.match_seconds = NowSeconds() - t;
  bench.distance_evals = matches.distance_evals;
  if (gt) {
    bench.eval = Evaluate(matches, ref.keypoints, tgt.keypoints, *gt, config.eval);
  }
  return bench;
}

}  // namespace

BenchReport Benchmark(const ImageFeatures& ref, const ImageFeatures& tgt,
                      const Config& config,
                      const std::optional<RigidTransform>& gt) {
  config.Validate();
  BenchReport report;
  report.ref_keypoints = ref.keypoints.size();
  report.tgt_keypoints = tgt.keypoints.size();
  report.detect_seconds = ref.detect_seconds + tgt.detect_seconds;
  report.distance_evals_plain = static_cast<std::uint64_t>(ref.keypoints.size()) *
                                tgt.keypoints.size();
  report.ring = RunMode(ref, tgt, MatchMode::kRing, config, gt);
  report.rift2 = RunMode(ref, tgt, MatchMode::kRift2, config, gt);
  return report;
}

BenchReport Benchmark(const Image& ref, const Image& tgt, const Config& config,
                      const std::optional<RigidTransform>& gt) {
  const ImageFeatures ref_features = ExtractFeatures(ref, config);
  const ImageFeatures tgt_features = ExtractFeatures(tgt, config);
  return Benchmark(ref_features, tgt_features, config, gt);
}

}  // namespace rift2
