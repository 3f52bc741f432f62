#include "rift2/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <opencv2/imgproc.hpp>

#include "rift2/error.h"

namespace rift2::synthetic {
namespace {

Image Blur(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  cv::Mat src(img.Height(), img.Width(), CV_64F,
              const_cast<double*>(img.Data().data()));
  cv::Mat dst;
  cv::GaussianBlur(src, dst, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);
  Image out(img.Width(), img.Height());
  for (int y = 0; y < img.Height(); ++y) {
    const double* row = dst.ptr<double>(y);
    std::copy(row, row + img.Width(),
              out.Data().begin() + static_cast<std::ptrdiff_t>(y) * img.Width());
  }
  return out;
}

}  // namespace

LabelMap GenerateLabels(int width, int height, std::uint64_t seed,
                        const SceneOptions& options) {
  RIFT2_CHECK_PARAM(width > 0 && height > 0, "scene size must be positive");
  RIFT2_CHECK_PARAM(options.cell_size >= 2.0, "cell_size must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double pitch = options.cell_size;
  const int gx = static_cast<int>(std::ceil(width / pitch)) + 1;
  const int gy = static_cast<int>(std::ceil(height / pitch)) + 1;
  std::vector<double> sx(static_cast<std::size_t>(gx) * gy);
  std::vector<double> sy(sx.size());
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * gx + i;
      sx[k] = (i + unit(rng)) * pitch;
      sy[k] = (j + unit(rng)) * pitch;
    }
  }

  LabelMap map;
  map.width = width;
  map.height = height;
  map.labels.resize(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const int cj = static_cast<int>(y / pitch);
    for (int x = 0; x < width; ++x) {
      const int ci = static_cast<int>(x / pitch);
      double best = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (int j = std::max(0, cj - 2); j <= std::min(gy - 1, cj + 2); ++j) {
        for (int i = std::max(0, ci - 2); i <= std::min(gx - 1, ci + 2); ++i) {
          const int k = j * gx + i;
          const double d = (sx[k] - x) * (sx[k] - x) + (sy[k] - y) * (sy[k] - y);
          if (d < best) {
            best = d;
            best_k = k;
          }
        }
      }
      map.labels[static_cast<std::size_t>(y) * width + x] = best_k;
    }
  }
  int next_label = gx * gy;

  const int n_shapes = static_cast<int>(
      std::round(options.shapes_per_10k_px * width * height / 1e4));
  for (int s = 0; s < n_shapes; ++s) {
    const double cx = unit(rng) * width;
    const double cy = unit(rng) * height;
    const double a = pitch * (0.4 + 1.6 * unit(rng));
    const double b = pitch * (0.3 + 1.2 * unit(rng));
    const double phi = unit(rng) * std::numbers::pi;
    const int kind = static_cast<int>(unit(rng) * 3.0);
    const double c = std::cos(phi), sn = std::sin(phi);
    // Triangle vertices in the shape frame.
    const double t0 = unit(rng) * 2 * std::numbers::pi;
    const double tx[3] = {a * std::cos(t0), a * std::cos(t0 + 2.2),
                          a * std::cos(t0 + 4.1)};
    const double ty[3] = {b * std::sin(t0), b * std::sin(t0 + 2.2),
                          b * std::sin(t0 + 4.1)};
    const int label = next_label++;
    const double r = std::max(a, b);
    for (int y = std::max(0, static_cast<int>(cy - r));
         y <= std::min(height - 1, static_cast<int>(cy + r)); ++y) {
      for (int x = std::max(0, static_cast<int>(cx - r));
           x <= std::min(width - 1, static_cast<int>(cx + r)); ++x) {
        const double u = c * (x - cx) + sn * (y - cy);
        const double v = -sn * (x - cx) + c * (y - cy);
        bool inside = false;
        if (kind == 0) {
          inside = (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
        } else if (kind == 1) {
          inside = std::abs(u) <= a && std::abs(v) <= b * 0.7;
        } else {
          inside = true;
          for (int e = 0; e < 3; ++e) {
            const int f = (e + 1) % 3;
            const double cross =
                (tx[f] - tx[e]) * (v - ty[e]) - (ty[f] - ty[e]) * (u - tx[e]);
            const double orient =
                (tx[1] - tx[0]) * (ty[2] - ty[0]) - (ty[1] - ty[0]) * (tx[2] - tx[0]);
            if (cross * orient < 0) inside = false;
          }
        }
        if (inside) map.labels[static_cast<std::size_t>(y) * width + x] = label;
      }
    }
  }
  map.num_labels = next_label;
  return map;
}

std::vector<double> RandomIntensities(int num_labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  std::vector<double> out(num_labels);
  for (double& v : out) v = dist(rng);
  return out;
}

Image RenderLabels(const LabelMap& labels, const std::vector<double>& intensities,
                   const SceneOptions& options, std::uint64_t noise_seed) {
  RIFT2_CHECK_PARAM(static_cast<int>(intensities.size()) >= labels.num_labels,
                    "intensity table shorter than the label count");
  Image img(labels.width, labels.height);
  auto dst = img.Data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = intensities[labels.labels[i]];
  }
  img = Blur(img, options.blur_sigma);
  if (options.noise_sigma > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, options.noise_sigma);
    for (double& v : img.Data()) v += noise(rng);
  }
  for (double& v : img.Data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

Image Scene(int width, int height, std::uint64_t seed,
            const SceneOptions& options) {
  const LabelMap labels = GenerateLabels(width, height, seed, options);
  return RenderLabels(labels, RandomIntensities(labels.num_labels, seed + 1),
                      options, seed + 2);
}

ModalityPair MultimodalScene(int width, int height, std::uint64_t seed,
                             const SceneOptions& options) {
  const LabelMap labels = GenerateLabels(width, height, seed, options);
  ModalityPair pair;
  pair.optical = RenderLabels(
      labels, RandomIntensities(labels.num_labels, seed + 1), options, seed + 2);
  Image radar = RenderLabels(
      labels, RandomIntensities(labels.num_labels, seed + 3), options, seed + 4);
  // Multiplicative speckle, gamma distributed with unit mean (4 looks).
  std::mt19937_64 rng(seed + 5);
  std::gamma_distribution<double> speckle(4.0, 0.25);
  for (double& v : radar.Data()) v = std::clamp(v * speckle(rng), 0.0, 1.0);
  pair.radar = std::move(radar);
  return pair;
}

Image Noise(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.5, 0.15);
  Image img(width, height);
  for (double& v : img.Data()) v = dist(rng);
  img = Blur(img, 0.8);
  for (double& v : img.Data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

Image SquareGrid(int width, int height, int square, int pitch) {
  RIFT2_CHECK_PARAM(square > 0 && pitch > square, "pitch must exceed square");
  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x % pitch < square && y % pitch < square) img(x, y) = 1.0;
    }
  }
  return img;
}

}  // namespace rift2::synthetic
