#pragma once

#include <cstdint>
#include <vector>

#include "rift2/image.h"

namespace rift2::synthetic {

struct SceneOptions {
  // Mean Voronoi cell pitch in pixels.
  double cell_size = 24.0;
  // Random ellipses, rectangles and triangles painted over the cells, per
  // 100x100 pixels.
  double shapes_per_10k_px = 4.0;
  double blur_sigma = 1.0;
  double noise_sigma = 0.0;
};

// Piecewise-constant label map: jittered-grid Voronoi cells overlaid with
// random convex shapes. Labels are 0..num_labels-1.
struct LabelMap {
  int width = 0;
  int height = 0;
  int num_labels = 0;
  std::vector<int> labels;
};

LabelMap GenerateLabels(int width, int height, std::uint64_t seed,
                        const SceneOptions& options = {});

// Paints label l with intensities[l], then blurs and adds Gaussian noise
// (seeded), clamping to [0, 1].
Image RenderLabels(const LabelMap& labels, const std::vector<double>& intensities,
                   const SceneOptions& options, std::uint64_t noise_seed);

// Uniform random intensity in [0.05, 0.95] per label.
std::vector<double> RandomIntensities(int num_labels, std::uint64_t seed);

// Structured grayscale scene, deterministic in the seed.
Image Scene(int width, int height, std::uint64_t seed,
            const SceneOptions& options = {});

// The same label geometry rendered with two unrelated intensity tables and
// multiplicative speckle on the second image, a stand-in for a sensor pair
// with nonlinear radiometric differences.
struct ModalityPair {
  Image optical;
  Image radar;
};
ModalityPair MultimodalScene(int width, int height, std::uint64_t seed,
                             const SceneOptions& options = {});

// Independent Gaussian noise, lightly blurred, mapped to roughly [0, 1].
Image Noise(int width, int height, std::uint64_t seed);

// Image of nonzero size with a grid of bright squares on black.
Image SquareGrid(int width, int height, int square, int pitch);

}  // namespace rift2::synthetic
