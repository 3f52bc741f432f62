#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rift2/image.h"

namespace rift2 {

// Maximum index map: per pixel the 1-based orientation channel with the
// largest amplitude sum, plus that amplitude. Patches cut out of a map use
// the same type.
class IndexMap {
 public:
  IndexMap() = default;
  IndexMap(int width, int height, int n_orient);
  IndexMap(int width, int height, int n_orient, std::vector<std::uint8_t> indices,
           std::vector<double> max_amplitude);

  int Width() const { return width_; }
  int Height() const { return height_; }
  int NumOrient() const { return n_orient_; }
  std::size_t NumPixels() const { return indices_.size(); }

  std::uint8_t& Index(int x, int y) { return indices_[Offset(x, y)]; }
  std::uint8_t Index(int x, int y) const { return indices_[Offset(x, y)]; }
  double& Amplitude(int x, int y) { return max_amplitude_[Offset(x, y)]; }
  double Amplitude(int x, int y) const { return max_amplitude_[Offset(x, y)]; }

  std::span<std::uint8_t> Indices() { return indices_; }
  std::span<const std::uint8_t> Indices() const { return indices_; }
  std::span<double> Amplitudes() { return max_amplitude_; }
  std::span<const double> Amplitudes() const { return max_amplitude_; }

  // Axis-aligned sub-region [x0, x0 + w) x [y0, y0 + h).
  IndexMap Crop(int x0, int y0, int w, int h) const;

  friend bool operator==(const IndexMap&, const IndexMap&) = default;

 private:
  std::size_t Offset(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int n_orient_ = 0;
  std::vector<std::uint8_t> indices_;
  std::vector<double> max_amplitude_;
};

// Per-pixel argmax over the channels; ties go to the smallest index.
IndexMap BuildMim(std::span<const Image> a_o);

// Tallies of index values; bin b (0-based) counts index b + 1. With
// weight_by_amplitude every pixel contributes its max amplitude instead of 1.
struct IndexHistogram {
  std::vector<double> counts;

  double Total() const;
};

IndexHistogram PatchHistogram(const IndexMap& patch,
                              bool weight_by_amplitude = false);

// Peak bin s of the histogram, followed by the runner-up when it holds at
// least `ratio` of the peak (inclusive). 1-based, at most two entries.
std::vector<int> DominantIndices(const IndexHistogram& h, double ratio = 0.8);

// v -> v - s + 1 for v >= s, else v + n - s + 1.
inline int RecodeValue(int v, int s, int n) {
  return v >= s ? v - s + 1 : v + n - s + 1;
}

// v -> ((v - w) mod n) + 1; w = 1 is the identity.
inline int CyclicShiftValue(int v, int w, int n) {
  return ((v - w) % n + n) % n + 1;
}

IndexMap Recode(const IndexMap& patch, int s);
IndexMap CyclicShift(const IndexMap& patch, int w);

// Histogram of CyclicShift(patch, w) computed from the histogram of patch.
IndexHistogram CyclicShift(const IndexHistogram& h, int w);

// 8-bit PGM with index v written as v * (255 / n_orient), i.e. x42 for six
// orientations.
void SaveIndexMapPgm(const IndexMap& mim, const std::filesystem::path& path);

}  // namespace rift2
