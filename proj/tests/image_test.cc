#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rift2/error.h"
#include "rift2/image.h"

namespace rift2 {
namespace {

namespace fs = std::filesystem;

class ImageIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rift2_image_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

void WriteBytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST_F(ImageIoTest, BinaryPgmScalesBytes) {
  WriteBytes(dir_ / "a.pgm", std::string("P5\n2 2\n255\n") + std::string("\x00\xff\xff\x00", 4));
  const Image img = LoadImage(dir_ / "a.pgm");
  ASSERT_EQ(img.Width(), 2);
  ASSERT_EQ(img.Height(), 2);
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(1, 0), 1.0);
  EXPECT_EQ(img(0, 1), 1.0);
  EXPECT_EQ(img(1, 1), 0.0);
}

TEST_F(ImageIoTest, AsciiPgmWithComments) {
  WriteBytes(dir_ / "a.pgm", "P2\n# comment\n3 1\n# another\n10\n0 5 10\n");
  const Image img = LoadImage(dir_ / "a.pgm");
  ASSERT_EQ(img.Width(), 3);
  EXPECT_DOUBLE_EQ(img(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(img(2, 0), 1.0);
}

TEST_F(ImageIoTest, WhiteColorPngIsOne) {
  const cv::Mat white(5, 7, CV_8UC3, cv::Scalar(255, 255, 255));
  ASSERT_TRUE(cv::imwrite((dir_ / "w.png").string(), white));
  const Image img = LoadImage(dir_ / "w.png");
  ASSERT_EQ(img.Width(), 7);
  ASSERT_EQ(img.Height(), 5);
  for (const double v : img.Data()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST_F(ImageIoTest, ColorUsesLuminanceWeights) {
  // Pure red, green, blue pixels in OpenCV's BGR order.
  cv::Mat m(1, 3, CV_8UC3);
  m.at<cv::Vec3b>(0, 0) = {0, 0, 255};
  m.at<cv::Vec3b>(0, 1) = {0, 255, 0};
  m.at<cv::Vec3b>(0, 2) = {255, 0, 0};
  ASSERT_TRUE(cv::imwrite((dir_ / "rgb.png").string(), m));
  const Image img = LoadImage(dir_ / "rgb.png");
  EXPECT_NEAR(img(0, 0), 0.299, 1e-12);
  EXPECT_NEAR(img(1, 0), 0.587, 1e-12);
  EXPECT_NEAR(img(2, 0), 0.114, 1e-12);
}

TEST_F(ImageIoTest, SixteenBitPngScales) {
  cv::Mat m(1, 2, CV_16UC1);
  m.at<std::uint16_t>(0, 0) = 0;
  m.at<std::uint16_t>(0, 1) = 65535;
  ASSERT_TRUE(cv::imwrite((dir_ / "d.png").string(), m));
  const Image img = LoadImage(dir_ / "d.png");
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(1, 0), 1.0);
}

TEST_F(ImageIoTest, TruncatedPgmIsFormatError) {
  WriteBytes(dir_ / "t.pgm", std::string("P5\n4 4\n255\n") + std::string("\x01\x02\x03", 3));
  EXPECT_THROW(LoadImage(dir_ / "t.pgm"), FormatError);
  WriteBytes(dir_ / "h.pgm", "P5\n4");
  EXPECT_THROW(LoadImage(dir_ / "h.pgm"), FormatError);
}

TEST_F(ImageIoTest, GarbageIsFormatError) {
  WriteBytes(dir_ / "g.png", "definitely not an image");
  EXPECT_THROW(LoadImage(dir_ / "g.png"), FormatError);
}

TEST_F(ImageIoTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadImage(dir_ / "absent.png"), IoError);
}

TEST_F(ImageIoTest, SaveClampsAndRoundsHalfUp) {
  Image img(5, 1);
  img(0, 0) = 1.0;
  img(1, 0) = -0.2;
  img(2, 0) = 1.7;
  img(3, 0) = 0.5 / 255.0;  // exactly half a step: rounds up
  img(4, 0) = 0.49 / 255.0;
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = dir_ / (std::string("s") + ext);
    SaveImage(img, p);
    const cv::Mat m = cv::imread(p.string(), cv::IMREAD_UNCHANGED);
    ASSERT_EQ(m.type(), CV_8UC1) << ext;
    EXPECT_EQ(m.at<std::uint8_t>(0, 0), 255) << ext;
    EXPECT_EQ(m.at<std::uint8_t>(0, 1), 0) << ext;
    EXPECT_EQ(m.at<std::uint8_t>(0, 2), 255) << ext;
    EXPECT_EQ(m.at<std::uint8_t>(0, 3), 1) << ext;
    EXPECT_EQ(m.at<std::uint8_t>(0, 4), 0) << ext;
  }
}

TEST_F(ImageIoTest, SaveLoadRoundTripWithinQuantization) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(31, 17);
  for (double& v : img.Data()) v = u(rng);
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = dir_ / (std::string("r") + ext);
    SaveImage(img, p);
    const Image back = LoadImage(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < img.NumPixels(); ++i) {
      worst = std::max(worst, std::abs(back.Data()[i] - img.Data()[i]));
    }
    EXPECT_LE(worst, 1.0 / 255.0) << ext;
    // Idempotent once quantized.
    SaveImage(back, p);
    EXPECT_EQ(LoadImage(p), back) << ext;
  }
}

TEST_F(ImageIoTest, UnsupportedWriteExtension) {
  EXPECT_THROW(SaveImage(Image(2, 2), dir_ / "x.bmpx"), FormatError);
  EXPECT_THROW(SaveImage(Image(2, 2), dir_ / "no_dir" / "x.png"), IoError);
}

TEST(ImageTest, ConstructorChecksLength) {
  EXPECT_THROW(Image(2, 2, std::vector<double>(3)), ParameterError);
}

TEST(ImageTest, BilinearSample) {
  Image img(2, 2, std::vector<double>{0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(img.Sample(0.5, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(img.Sample(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(img.Sample(0.25, 1.0), 2.25);
  EXPECT_EQ(img.Sample(-0.01, 0.0), 0.0);
  EXPECT_EQ(img.Sample(0.0, 1.01), 0.0);
}

TEST(WarpTest, IdentityIsBitExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(23, 11);
  for (double& v : img.Data()) v = u(rng);
  EXPECT_EQ(WarpRigid(img, RigidTransform::Identity(), 23, 11), img);
  // Larger canvas: overlap identical, the rest zero.
  const Image big = WarpRigid(img, RigidTransform::Identity(), 30, 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 30; ++x) {
      EXPECT_EQ(big(x, y), img.Contains(x, y) ? img(x, y) : 0.0);
    }
  }
}

TEST(WarpTest, QuarterTurnMovesPixelByExactAlgebra) {
  // [[0, 1], [0, 0]]: the bright pixel is at (x=1, y=0).
  const Image img(2, 2, std::vector<double>{0, 1, 0, 0});
  const Eigen::Vector2d center(0.5, 0.5);
  const RigidTransform t = RigidTransform::RotationAbout(std::numbers::pi / 2, center);
  // R(90) (x, y) = (-y, x) about the center: (1, 0) -> (1, 1).
  const Eigen::Vector2d moved = center + Eigen::Vector2d(-(0 - 0.5), 1 - 0.5);
  const Image out = WarpRigid(img, t, 2, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      const bool bright = x == static_cast<int>(moved.x()) && y == static_cast<int>(moved.y());
      EXPECT_EQ(out(x, y), bright ? 1.0 : 0.0) << x << "," << y;
    }
  }
}

TEST(WarpTest, RotateAndBackIsCloseOnSmoothImage) {
  const int n = 128;
  Image img(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      img(x, y) = 0.5 + 0.25 * std::sin(x / 7.0) * std::cos(y / 5.0) + 0.2 * std::sin((x + y) / 11.0);
    }
  }
  const Eigen::Vector2d c((n - 1) / 2.0, (n - 1) / 2.0);
  const double a = 37.0 * std::numbers::pi / 180.0;
  const Image there = WarpRigid(img, RigidTransform::RotationAbout(a, c), n, n);
  const Image back = WarpRigid(there, RigidTransform::RotationAbout(-a, c), n, n);
  // Interior: pixels at least 10 px from the border whose rotated position is
  // too, i.e. the disc that stays inside the frame under any rotation.
  const double radius = n / 2.0 - 10.0;
  double err = 0.0;
  int count = 0;
  for (int y = 10; y < n - 10; ++y) {
    for (int x = 10; x < n - 10; ++x) {
      if (std::hypot(x - c.x(), y - c.y()) > radius) continue;
      err += std::abs(back(x, y) - img(x, y));
      ++count;
    }
  }
  ASSERT_GT(count, 5000);
  EXPECT_LE(err / count, 0.05);
}

TEST(RigidTransformTest, ValidateAndCompose) {
  const Eigen::Vector2d c(10, 20);
  const RigidTransform a = RigidTransform::RotationAbout(0.3, c);
  EXPECT_NO_THROW(a.Validate());
  const RigidTransform id = a * a.Inverse();
  EXPECT_LT((id.rotation - Eigen::Matrix2d::Identity()).norm(), 1e-12);
  EXPECT_LT(id.translation.norm(), 1e-12);
  EXPECT_LT((a(c) - c).norm(), 1e-12);

  RigidTransform reflect;
  reflect.rotation << 1, 0, 0, -1;
  EXPECT_THROW(reflect.Validate(), ParameterError);
  RigidTransform scaled;
  scaled.rotation *= 1.01;
  EXPECT_THROW(scaled.Validate(), ParameterError);
}

TEST(NormalizeTest, MinMax) {
  Image img(3, 1, std::vector<double>{2, 4, 6});
  const Image n = NormalizeMinMax(img);
  EXPECT_EQ(n(0, 0), 0.0);
  EXPECT_EQ(n(1, 0), 0.5);
  EXPECT_EQ(n(2, 0), 1.0);
  const Image flat = NormalizeMinMax(Image(3, 3, 0.7));
  for (double v : flat.Data()) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace rift2
