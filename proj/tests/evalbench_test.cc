#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "rift2/error.h"
#include "rift2/evalbench.h"
#include "rift2/io.h"
#include "rift2/synthetic.h"

namespace rift2 {
namespace {

std::vector<Keypoint> LineKeypoints(int n) {
  std::vector<Keypoint> kps;
  for (int i = 0; i < n; ++i) kps.push_back({10.0 + 3 * i, 20.0 + i, 1.0});
  return kps;
}

MatchSet IdentityMatches(int n) {
  MatchSet m;
  for (int i = 0; i < n; ++i) m.pairs.push_back({std::uint32_t(i), std::uint32_t(i), 0.0});
  return m;
}

TEST(EvaluateTest, SelfMatch) {
  const auto kps = LineKeypoints(50);
  const EvalReport r = Evaluate(IdentityMatches(50), kps, kps, RigidTransform::Identity(), {});
  EXPECT_EQ(r.n_correct, 50u);
  ASSERT_TRUE(r.rmse);
  EXPECT_EQ(*r.rmse, 0.0);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.n_matches_total, 50u);
}

TEST(EvaluateTest, NoMatchesIsInfinite) {
  const auto kps = LineKeypoints(5);
  const EvalReport r = Evaluate(MatchSet{}, kps, kps, RigidTransform::Identity(), {});
  EXPECT_EQ(r.n_correct, 0u);
  EXPECT_FALSE(r.rmse);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(FormatRmse(r.rmse), "∞");
  EXPECT_EQ(RmseToJson(r.rmse).get<std::string>(), "∞");
}

TEST(EvaluateTest, ResidualThresholdIsStrict) {
  const std::vector<Keypoint> ref = {{0, 0, 1}};
  const std::vector<Keypoint> at = {{3, 0, 1}};
  const std::vector<Keypoint> inside = {{2.999, 0, 1}};
  const MatchSet m = IdentityMatches(1);
  EXPECT_EQ(Evaluate(m, ref, at, RigidTransform::Identity(), {}).n_correct, 0u);
  const EvalReport r = Evaluate(m, ref, inside, RigidTransform::Identity(), {});
  EXPECT_EQ(r.n_correct, 1u);
  EXPECT_NEAR(*r.rmse, 2.999, 1e-12);
  EXPECT_FALSE(r.success);
}

TEST(EvaluateTest, RmseOracleAndCap) {
  // Residuals 1 and 2 (for a translation by (1, 0) / (2, 0)): rmse sqrt(2.5).
  const std::vector<Keypoint> ref = {{0, 0, 1}, {5, 5, 1}};
  const std::vector<Keypoint> tgt = {{1, 0, 1}, {7, 5, 1}};
  EXPECT_NEAR(*Evaluate(IdentityMatches(2), ref, tgt, RigidTransform::Identity(), {}).rmse,
              std::sqrt(2.5), 1e-12);
  EvalConfig loose;
  loose.residual_threshold = 100;
  const std::vector<Keypoint> far = {{50, 0, 1}, {55, 5, 1}};
  EXPECT_EQ(*Evaluate(IdentityMatches(2), ref, far, RigidTransform::Identity(), loose).rmse, 20.0);
}

TEST(EvaluateTest, UsesGroundTruthDirection) {
  const std::vector<Keypoint> ref = {{10, 0, 1}};
  const std::vector<Keypoint> tgt = {{0, 10, 1}};
  const RigidTransform quarter = RigidTransform::RotationAbout(std::numbers::pi / 2, {0, 0});
  EXPECT_EQ(Evaluate(IdentityMatches(1), ref, tgt, quarter, {}).n_correct, 1u);
  EXPECT_EQ(Evaluate(IdentityMatches(1), ref, tgt, quarter.Inverse(), {}).n_correct, 0u);
}

TEST(EvaluateTest, OrderIndependent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 200);
  std::vector<Keypoint> ref, tgt;
  MatchSet m;
  for (std::uint32_t i = 0; i < 60; ++i) {
    ref.push_back({u(rng), u(rng), 1});
    tgt.push_back({ref.back().x + u(rng) / 50, ref.back().y, 1});
    m.pairs.push_back({i, i, 0.0});
  }
  const EvalReport a = Evaluate(m, ref, tgt, RigidTransform::Identity(), {});
  std::shuffle(m.pairs.begin(), m.pairs.end(), rng);
  const EvalReport b = Evaluate(m, ref, tgt, RigidTransform::Identity(), {});
  EXPECT_EQ(a.n_correct, b.n_correct);
  EXPECT_NEAR(*a.rmse, *b.rmse, 1e-12);
}

TEST(EvaluateTest, UnknownIdIsIntegrityError) {
  const auto kps = LineKeypoints(3);
  MatchSet m;
  m.pairs.push_back({0, 3, 0.0});
  EXPECT_THROW(Evaluate(m, kps, kps, RigidTransform::Identity(), {}), IntegrityError);
}

class DatasetTest : public ::testing::Test {
 protected:
  static DatasetPair Pair(const std::string& name, const Image& a, const Image& b) {
    DatasetPair p;
    p.name = name;
    p.ref_image = a;
    p.tgt_image = b;
    return p;
  }
  static const Image& SceneImage() {
    static const Image img = synthetic::Scene(192, 192, 3);
    return img;
  }
  static const Image& NoiseA() {
    static const Image img = synthetic::Noise(192, 192, 100);
    return img;
  }
  static const Image& NoiseB() {
    static const Image img = synthetic::Noise(192, 192, 200);
    return img;
  }
};

TEST_F(DatasetTest, SelfPairSucceeds) {
  const DatasetSummary s = DatasetEval({Pair("self", SceneImage(), SceneImage())}, MatchMode::kRift2, {});
  EXPECT_EQ(s.success_rate, 100.0);
  EXPECT_EQ(s.successes, 1u);
  EXPECT_GT(s.mean_n, 10.0);
  EXPECT_EQ(s.mean_n, s.mean_n_success);
}

TEST_F(DatasetTest, SelfPlusNoiseIsHalf) {
  std::vector<DatasetPair> pairs = {Pair("self", SceneImage(), SceneImage()),
                                    Pair("noise", NoiseA(), NoiseB())};
  const DatasetSummary s = DatasetEval(pairs, MatchMode::kRift2, {});
  ASSERT_EQ(s.per_pair.size(), 2u);
  EXPECT_FALSE(s.per_pair[1].report.success);
  EXPECT_EQ(s.success_rate, 50.0);
  // Failed pair contributes the cap; the self pair contributes ~0.
  EXPECT_NEAR(s.mean_rmse, (20.0 + s.per_pair[0].report.rmse.value()) / 2, 1e-12);
  EXPECT_NEAR(s.mean_n, (s.per_pair[0].report.n_correct + s.per_pair[1].report.n_correct) / 2.0, 1e-12);
  EXPECT_EQ(s.mean_n_success, static_cast<double>(s.per_pair[0].report.n_correct));

  std::reverse(pairs.begin(), pairs.end());
  EXPECT_EQ(DatasetEval(pairs, MatchMode::kRift2, {}).success_rate, 50.0);

  // Dropping the failed pair cannot lower the rate.
  pairs.erase(pairs.begin());
  EXPECT_EQ(DatasetEval(pairs, MatchMode::kRift2, {}).success_rate, 100.0);
}

TEST_F(DatasetTest, UnreadablePairIsRecordedAndRunContinues) {
  DatasetPair missing;
  missing.name = "missing";
  missing.ref_path = "/nonexistent/ref.png";
  missing.tgt_path = "/nonexistent/tgt.png";
  const DatasetSummary s = DatasetEval({missing, Pair("self", SceneImage(), SceneImage())},
                                       MatchMode::kRing, {});
  ASSERT_EQ(s.per_pair.size(), 2u);
  EXPECT_TRUE(s.per_pair[0].error);
  EXPECT_FALSE(s.per_pair[0].report.success);
  EXPECT_FALSE(s.per_pair[1].error);
  EXPECT_TRUE(s.per_pair[1].report.success);
  EXPECT_EQ(s.success_rate, 50.0);
  EXPECT_EQ(s.mode, MatchMode::kRing);
}

TEST_F(DatasetTest, BenchmarkCountingLaws) {
  const Eigen::Vector2d c(95.5, 95.5);
  const RigidTransform gt = RigidTransform::RotationAbout(std::numbers::pi / 6, c);
  const Image tgt = WarpRigid(SceneImage(), gt, 192, 192);
  const BenchReport b = Benchmark(SceneImage(), tgt, Config{}, gt);
  ASSERT_GT(b.ref_keypoints, 0u);
  EXPECT_EQ(b.ring.ref_descriptors, 6 * b.ref_keypoints);
  EXPECT_EQ(b.ring.tgt_descriptors, b.tgt_keypoints);
  EXPECT_EQ(b.ring.distance_evals, 6 * b.distance_evals_plain);
  EXPECT_GE(b.rift2.ref_descriptors, 1u);
  EXPECT_LE(b.rift2.ref_descriptors, 2 * b.ref_keypoints);
  EXPECT_EQ(b.rift2.distance_evals,
            std::uint64_t(b.rift2.ref_descriptors) * b.rift2.tgt_descriptors);
  EXPECT_NEAR(b.DescriptorReduction(6), 6.0 * b.ref_keypoints / b.rift2.ref_descriptors, 1e-12);
  ASSERT_TRUE(b.ring.eval);
  ASSERT_TRUE(b.rift2.eval);
  EXPECT_GT(b.Speedup(), 0.0);
}

}  // namespace
}  // namespace rift2
