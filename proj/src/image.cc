#include "rift2/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/LU>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rift2/error.h"

namespace rift2 {
namespace {

// Avoids 6e-17 style residue in cos/sin of multiples of pi/2, so quarter and
// half turns stay exact.
double SnapUnit(double v) {
  constexpr double kEps = 1e-15;
  if (std::abs(v) < kEps) return 0.0;
  if (std::abs(v - 1.0) < kEps) return 1.0;
  if (std::abs(v + 1.0) < kEps) return -1.0;
  return v;
}

std::string LowerExtension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Skips whitespace and '#' comments between PNM header tokens.
bool NextPnmToken(std::istream& in, std::string* token) {
  token->clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      token->push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
    token->push_back(static_cast<char>(in.get()));
  }
  return !token->empty();
}

int ParsePnmInt(std::istream& in, const std::filesystem::path& path) {
  std::string tok;
  if (!NextPnmToken(in, &tok)) {
    throw FormatError("truncated PGM header: " + path.string());
  }
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad PGM header field '" + tok + "': " + path.string());
  }
}

Image ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  NextPnmToken(in, &magic);
  if (magic != "P2" && magic != "P5") {
    throw FormatError("not a P2/P5 PGM: " + path.string());
  }
  const int width = ParsePnmInt(in, path);
  const int height = ParsePnmInt(in, path);
  const int maxval = ParsePnmInt(in, path);
  if (maxval > 65535) throw FormatError("PGM maxval too large");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> data(n);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    const int bytes_per_sample = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes_per_sample);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw FormatError("truncated PGM raster: " + path.string());
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int v = bytes_per_sample == 1
                        ? raw[i]
                        : (raw[2 * i] << 8) | raw[2 * i + 1];
      data[i] = static_cast<double>(v) / maxval;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::string tok;
      if (!NextPnmToken(in, &tok)) {
        throw FormatError("truncated PGM raster: " + path.string());
      }
      data[i] = std::stod(tok) / maxval;
    }
  }
  return Image(width, height, std::move(data));
}

void WritePgm(const std::vector<std::uint8_t>& bytes, int width, int height,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(width) * height, fill) {
  RIFT2_CHECK_PARAM(width >= 0 && height >= 0, "negative image size");
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  RIFT2_CHECK_PARAM(width >= 0 && height >= 0, "negative image size");
  RIFT2_CHECK_PARAM(data_.size() == static_cast<std::size_t>(width) * height,
                    "image data length does not match dimensions");
}

double Image::Sample(double x, double y) const {
  if (!(x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1)) {
    return 0.0;
  }
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double top = (*this)(x0, y0) * (1.0 - fx) + (*this)(x1, y0) * fx;
  const double bottom = (*this)(x0, y1) * (1.0 - fx) + (*this)(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

RigidTransform RigidTransform::RotationAbout(double angle,
                                             const Eigen::Vector2d& center) {
  const double c = SnapUnit(std::cos(angle));
  const double s = SnapUnit(std::sin(angle));
  RigidTransform t;
  t.rotation << c, -s, s, c;
  t.translation = center - t.rotation * center;
  return t;
}

RigidTransform RigidTransform::Inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform t;
  t.rotation = a.rotation * b.rotation;
  t.translation = a.rotation * b.translation + a.translation;
  return t;
}

void RigidTransform::Validate() const {
  constexpr double kTol = 1e-9;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ParameterError("rigid transform has non-finite entries");
  }
  const Eigen::Matrix2d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > kTol ||
      std::abs(rotation.determinant() - 1.0) > kTol) {
    throw ParameterError("rotation is not orthonormal with det +1");
  }
}

Image LoadImage(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("no such file: " + path.string());
  }
  const std::string ext = LowerExtension(path);
  if (ext == ".pgm" || ext == ".pnm") return ReadPgm(path);

  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) {
    throw FormatError("unsupported or corrupt image: " + path.string());
  }
  double scale = 1.0;
  switch (mat.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    case CV_32F:
    case CV_64F: break;
    default: throw FormatError("unsupported pixel depth: " + path.string());
  }
  cv::Mat as_double;
  mat.convertTo(as_double, CV_64F, scale);

  const int channels = as_double.channels();
  Image img(as_double.cols, as_double.rows);
  for (int y = 0; y < as_double.rows; ++y) {
    const double* row = as_double.ptr<double>(y);
    for (int x = 0; x < as_double.cols; ++x) {
      const double* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      double v;
      if (channels >= 3) {
        // OpenCV orders channels B, G, R (alpha ignored).
        v = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
      } else {
        v = px[0];
      }
      if (!std::isfinite(v)) {
        throw FormatError("non-finite pixel in " + path.string());
      }
      img(x, y) = v;
    }
  }
  return img;
}

void SaveImage(const Image& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.NumPixels());
  const auto src = img.Data();
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(src[i], 0.0, 1.0);
    bytes[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
  }
  const std::string ext = LowerExtension(path);
  if (ext == ".pgm") {
    WritePgm(bytes, img.Width(), img.Height(), path);
    return;
  }
  if (ext != ".png") {
    throw FormatError("can only write .png or .pgm: " + path.string());
  }
  const cv::Mat mat(img.Height(), img.Width(), CV_8UC1, bytes.data());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

Image WarpRigid(const Image& img, const RigidTransform& t, int out_width,
                int out_height) {
  RIFT2_CHECK_PARAM(out_width > 0 && out_height > 0,
                    "warp output size must be positive");
  const RigidTransform inv = t.Inverse();
  Image out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector2d src = inv(Eigen::Vector2d(x, y));
      out(x, y) = img.Sample(src.x(), src.y());
    }
  }
  return out;
}

Image NormalizeMinMax(const Image& img, double min_range) {
  Image out(img.Width(), img.Height());
  if (img.Empty()) return out;
  const auto [lo, hi] = std::minmax_element(img.Data().begin(), img.Data().end());
  const double range = *hi - *lo;
  if (!(range > min_range) || range <= 0.0) return out;
  const auto src = img.Data();
  auto dst = out.Data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - *lo) / range;
  return out;
}

}  // namespace rift2
