#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rift2 {

// Single-channel raster of doubles stored row-major. Nominal intensity range
// is [0, 1], but the same type carries any per-pixel quantity (PC maps,
// amplitude sums, ...).
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int Width() const { return width_; }
  int Height() const { return height_; }
  std::size_t NumPixels() const { return data_.size(); }
  bool Empty() const { return data_.empty(); }

  double& operator()(int x, int y) { return data_[Index(x, y)]; }
  double operator()(int x, int y) const { return data_[Index(x, y)]; }

  std::span<double> Data() { return data_; }
  std::span<const double> Data() const { return data_; }

  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  // Bilinear sample at a sub-pixel location; 0 outside the raster.
  double Sample(double x, double y) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// p_tgt = rotation * p_src + translation, in pixel coordinates with x to the
// right and y down.
struct RigidTransform {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  static RigidTransform Identity() { return {}; }

  // Rotation by `angle` radians about `center`, mapping center onto itself.
  static RigidTransform RotationAbout(double angle,
                                      const Eigen::Vector2d& center);

  Eigen::Vector2d operator()(const Eigen::Vector2d& p) const {
    return rotation * p + translation;
  }

  RigidTransform Inverse() const;
  // (a * b)(p) == a(b(p))
  friend RigidTransform operator*(const RigidTransform& a,
                                  const RigidTransform& b);

  // Throws ParameterError unless the rotation is orthonormal with
  // determinant +1 to 1e-9.
  void Validate() const;
};

// Reads PNG, PGM (P2/P5), TIFF or JPEG. Color inputs are reduced with
// 0.299 R + 0.587 G + 0.114 B; values are scaled to [0, 1].
Image LoadImage(const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG or binary PGM (chosen by extension).
// Values are clamped to [0, 1] and rounded half-up to [0, 255].
void SaveImage(const Image& img, const std::filesystem::path& path);

// Output pixel p takes the bilinear sample of `img` at t^-1(p); samples
// outside the source are 0.
Image WarpRigid(const Image& img, const RigidTransform& t, int out_width,
                int out_height);

// Rescales to [0, 1] by min/max. Maps with a range below `min_range` come back
// as all zeros.
Image NormalizeMinMax(const Image& img, double min_range = 0.0);

}  // namespace rift2
