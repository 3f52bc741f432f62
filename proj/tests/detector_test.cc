#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "rift2/detector.h"
#include "rift2/error.h"
#include "rift2/loggabor.h"
#include "rift2/synthetic.h"
#include "test_support.h"

namespace rift2 {
namespace {

Image SquareMap(int n, int x0, int y0, int side) {
  Image m(n, n);
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) m(x, y) = 1.0;
  }
  return m;
}

std::set<std::pair<int, int>> Locations(const std::vector<Keypoint>& kps) {
  std::set<std::pair<int, int>> out;
  for (const Keypoint& k : kps) out.insert({static_cast<int>(k.x), static_cast<int>(k.y)});
  return out;
}

TEST(FastTest, ConstantMapIsEmpty) {
  EXPECT_TRUE(DetectFast(Image(64, 64, 0.3), FastOptions{0.001, 100, 3}).empty());
  EXPECT_TRUE(DetectFast(Image(64, 64), FastOptions{}).empty());
}

TEST(FastTest, ResponseAgreesWithSegmentTestOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image map = synthetic::SquareGrid(48, 48, 5, 11);
  for (double& v : map.Data()) v = 0.8 * v + 0.2 * u(rng);
  const Image norm = NormalizeMinMax(map);
  const Image response = FastResponse(norm);
  for (const double t : {0.001, 0.05, 0.2, 0.5}) {
    for (int y = 3; y < 45; ++y) {
      for (int x = 3; x < 45; ++x) {
        ASSERT_EQ(response(x, y) > t, testing::SegmentTestOracle(norm, x, y, t))
            << x << "," << y << " t=" << t;
      }
    }
  }
}

TEST(FastTest, SmallSquareCornersAreFound) {
  const int x0 = 60, y0 = 58, side = 4;
  const std::vector<Keypoint> kps = DetectFast(SquareMap(128, x0, y0, side), FastOptions{});
  ASSERT_FALSE(kps.empty());
  const int corners[4][2] = {
      {x0, y0}, {x0 + side - 1, y0}, {x0, y0 + side - 1}, {x0 + side - 1, y0 + side - 1}};
  for (const auto& c : corners) {
    bool near = false;
    for (const Keypoint& k : kps) near |= std::hypot(k.x - c[0], k.y - c[1]) <= 2.0;
    EXPECT_TRUE(near) << c[0] << "," << c[1];
  }
  // Every reported point passes the oracle segment test.
  const Image norm = NormalizeMinMax(SquareMap(128, x0, y0, side));
  for (const Keypoint& k : kps) {
    EXPECT_TRUE(testing::SegmentTestOracle(norm, int(k.x), int(k.y), 0.001));
    EXPECT_GT(k.response, 0.0);
  }
}

TEST(FastTest, HigherThresholdGivesSubset) {
  const Image img = synthetic::Scene(160, 160, 9);
  const PCField pc = ComputePCField(img, BankParams{});
  for (const Image* map : {&pc.moment_min, &pc.moment_max}) {
    const auto low = Locations(DetectFast(*map, FastOptions{0.001, 100000, 48}));
    const auto high = Locations(DetectFast(*map, FastOptions{0.002, 100000, 48}));
    EXPECT_FALSE(low.empty());
    for (const auto& p : high) EXPECT_TRUE(low.count(p)) << p.first << "," << p.second;
  }
}

TEST(FastTest, SortedCappedAndInsideMargin) {
  const Image img = synthetic::Scene(160, 160, 9);
  const PCField pc = ComputePCField(img, BankParams{});
  const auto all = DetectFast(pc.moment_min, FastOptions{0.001, 100000, 20});
  ASSERT_GT(all.size(), 20u);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const Keypoint& a = all[i - 1];
    const Keypoint& b = all[i];
    ASSERT_TRUE(a.response > b.response ||
                (a.response == b.response && (a.y < b.y || (a.y == b.y && a.x < b.x))));
  }
  for (const Keypoint& k : all) {
    EXPECT_GE(k.x, 20);
    EXPECT_GE(k.y, 20);
    EXPECT_LE(k.x, 139);
    EXPECT_LE(k.y, 139);
  }
  const auto capped = DetectFast(pc.moment_min, FastOptions{0.001, 10, 20});
  ASSERT_EQ(capped.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(capped[i], all[i]);
}

TEST(FastTest, RejectsNonFiniteMap) {
  Image m(32, 32);
  m(5, 5) = std::nan("");
  EXPECT_THROW(DetectFast(m, FastOptions{}), ParameterError);
}

TEST(DetectKeypointsTest, ZeroFieldIsEmpty) {
  PCField f;
  f.moment_min = Image(128, 128);
  f.moment_max = Image(128, 128);
  EXPECT_TRUE(DetectKeypoints(f, DetectorConfig{}).empty());
}

TEST(DetectKeypointsTest, TooSmallForPatch) {
  PCField f;
  f.moment_min = Image(90, 128);
  f.moment_max = Image(90, 128);
  EXPECT_THROW(DetectKeypoints(f, DetectorConfig{}), ParameterError);
}

TEST(DetectKeypointsTest, CapBorderAndDeterminism) {
  const Image img = synthetic::Scene(256, 256, 21);
  const PCField pc = ComputePCField(img, BankParams{});
  const std::vector<Keypoint> a = DetectKeypoints(pc, DetectorConfig{});
  EXPECT_EQ(a, DetectKeypoints(pc, DetectorConfig{}));
  EXPECT_LE(a.size(), 5000u);
  for (const Keypoint& k : a) {
    EXPECT_GE(k.x, 48);
    EXPECT_GE(k.y, 48);
    EXPECT_LE(k.x + 48, 255);
    EXPECT_LE(k.y + 48, 255);
    EXPECT_GT(k.response, 0.0);
  }
  DetectorConfig small;
  small.max_points = 50;
  const std::vector<Keypoint> b = DetectKeypoints(pc, small);
  ASSERT_EQ(b.size(), 50u);
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_GE(b[i - 1].response, b[i].response);
}

TEST(DetectKeypointsTest, GridHasBothKindsAndMergesDuplicates) {
  // Grid of bright squares: corners dominate the minimum moment, sides the
  // maximum moment.
  const Image img = synthetic::SquareGrid(256, 256, 12, 32);
  const PCField pc = ComputePCField(img, BankParams{});
  const DetectorConfig cfg;
  const std::vector<Keypoint> kps = DetectKeypoints(pc, cfg);
  int corners = 0, edges = 0;
  for (const Keypoint& k : kps) (k.kind == KeypointKind::kCorner ? corners : edges)++;
  EXPECT_GT(corners, 0);
  EXPECT_GT(edges, 0);

  // Cross-oracle: the union is drawn from the two per-map FAST runs, and no
  // surviving pair of different kinds lies within the merge radius.
  const FastOptions fo{cfg.threshold, cfg.max_points, cfg.patch_size / 2};
  const auto c_set = Locations(DetectFast(pc.moment_min, fo, KeypointKind::kCorner));
  const auto e_set = Locations(DetectFast(pc.moment_max, fo, KeypointKind::kEdge));
  for (const Keypoint& k : kps) {
    const auto& set = k.kind == KeypointKind::kCorner ? c_set : e_set;
    EXPECT_TRUE(set.count({int(k.x), int(k.y)}));
  }
  for (std::size_t i = 0; i < kps.size(); ++i) {
    for (std::size_t j = i + 1; j < kps.size(); ++j) {
      if (kps[i].kind == kps[j].kind) continue;
      EXPECT_GT(std::hypot(kps[i].x - kps[j].x, kps[i].y - kps[j].y), cfg.merge_radius);
    }
  }
}

TEST(KeypointKindTest, StringRoundTrip) {
  for (const KeypointKind k : {KeypointKind::kCorner, KeypointKind::kEdge}) {
    EXPECT_EQ(KeypointKindFromString(ToString(k)), k);
  }
  EXPECT_THROW(KeypointKindFromString("blob"), FormatError);
}

}  // namespace
}  // namespace rift2
