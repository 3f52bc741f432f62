#include "rift2/descriptor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>

#include "rift2/error.h"
#include "rift2/parallel.h"

namespace rift2 {
namespace {

double SnapUnit(double v) {
  constexpr double kEps = 1e-12;
  if (std::abs(v) < kEps) return 0.0;
  if (std::abs(v - 1.0) < kEps) return 1.0;
  if (std::abs(v + 1.0) < kEps) return -1.0;
  return v;
}

// Row-major samples of the index map, plus the amplitudes when they are
// needed for weighting.
struct PatchBuffer {
  int width = 0;
  int height = 0;
  int n_orient = 0;
  std::vector<std::uint8_t> indices;
  std::vector<double> amplitudes;
};

// Whether every sample of the size x size grid rotated by (c, s) about kp
// lands inside the map. The grid is affine, so its corners decide.
bool PatchInside(const IndexMap& mim, const Keypoint& kp, int size, double c,
                 double s) {
  const double half = 0.5 * (size - 1);
  for (const double dj : {-half, half}) {
    for (const double di : {-half, half}) {
      const double fx = std::floor(kp.x + c * dj - s * di + 0.5);
      const double fy = std::floor(kp.y + s * dj + c * di + 0.5);
      if (fx < 0 || fy < 0 || fx > mim.Width() - 1 || fy > mim.Height() - 1) {
        return false;
      }
    }
  }
  return true;
}

// Sample (i, j) reads pixel floor(kp + R * (j - half, i - half) + 0.5).
// Returns false when any sample falls outside the map.
bool SamplePatch(const IndexMap& mim, const Keypoint& kp, int size,
                 double angle, bool with_amplitude, PatchBuffer* out) {
  RIFT2_CHECK_PARAM(size >= 1, "patch size must be >= 1");
  const double c = SnapUnit(std::cos(angle));
  const double s = SnapUnit(std::sin(angle));
  const double half = 0.5 * (size - 1);
  if (!PatchInside(mim, kp, size, c, s)) return false;

  const std::size_t n = static_cast<std::size_t>(size) * size;
  out->width = size;
  out->height = size;
  out->n_orient = mim.NumOrient();
  out->indices.resize(n);
  out->amplitudes.resize(with_amplitude ? n : 0);
  const auto src_idx = mim.Indices();
  const auto src_amp = mim.Amplitudes();
  const std::size_t stride = mim.Width();

  if (c == 1.0) {
    const std::size_t x0 = static_cast<std::size_t>(std::floor(kp.x - half + 0.5));
    const std::size_t y0 = static_cast<std::size_t>(std::floor(kp.y - half + 0.5));
    for (int i = 0; i < size; ++i) {
      const std::size_t from = (y0 + i) * stride + x0;
      std::memcpy(&out->indices[static_cast<std::size_t>(i) * size],
                  &src_idx[from], size);
      if (with_amplitude) {
        std::memcpy(&out->amplitudes[static_cast<std::size_t>(i) * size],
                    &src_amp[from], size * sizeof(double));
      }
    }
    return true;
  }

  // Per-column terms, summed in the same order as the per-pixel formula.
  std::vector<double> col_x(size), col_y(size);
  for (int j = 0; j < size; ++j) {
    col_x[j] = kp.x + c * (j - half);
    col_y[j] = kp.y + s * (j - half);
  }
  // The corner check bounds every coordinate below by zero, so truncation
  // is floor here. Offsets are computed in a separate pass so that the
  // arithmetic vectorizes.
  std::vector<std::int32_t> xs(size), ys(size);
  for (int i = 0; i < size; ++i) {
    const double di = i - half;
    const double row_x = s * di;
    const double row_y = c * di;
    for (int j = 0; j < size; ++j) {
      xs[j] = static_cast<std::int32_t>(col_x[j] - row_x + 0.5);
      ys[j] = static_cast<std::int32_t>(col_y[j] + row_y + 0.5);
    }
    const std::size_t at = static_cast<std::size_t>(i) * size;
    std::uint8_t* dst = &out->indices[at];
    for (int j = 0; j < size; ++j) dst[j] = src_idx[static_cast<std::size_t>(ys[j]) * stride + xs[j]];
    if (with_amplitude) {
      for (int j = 0; j < size; ++j) {
        out->amplitudes[at + j] = src_amp[static_cast<std::size_t>(ys[j]) * stride + xs[j]];
      }
    }
  }
  return true;
}

// Adds, for every grid cell of a row-major width x height index patch, the
// number of pixels holding each value 1..n to counts[cell * n + v - 1].
// Per-value byte compares into 8-bit lane accumulators, flushed before they
// can overflow; this form vectorizes.
void CountCells(const std::uint8_t* indices, int width, int height, int grid,
                int n, std::uint32_t* counts) {
  const int cell_w = width / grid;
  const int cell_h = height / grid;
  std::vector<std::uint8_t> acc(static_cast<std::size_t>(n) * width);
  auto flush = [&](int band) {
    for (int v = 1; v <= n; ++v) {
      std::uint8_t* a = &acc[static_cast<std::size_t>(v - 1) * width];
      for (int cx = 0; cx < grid; ++cx) {
        std::uint32_t sum = 0;
        for (int x = cx * cell_w; x < (cx + 1) * cell_w; ++x) sum += a[x];
        counts[static_cast<std::size_t>(band * grid + cx) * n + v - 1] += sum;
      }
    }
    std::fill(acc.begin(), acc.end(), 0);
  };
  for (int band = 0; band < grid; ++band) {
    int pending = 0;
    for (int y = band * cell_h; y < (band + 1) * cell_h; ++y) {
      const std::uint8_t* row = indices + static_cast<std::size_t>(y) * width;
      for (int v = 1; v <= n; ++v) {
        std::uint8_t* a = &acc[static_cast<std::size_t>(v - 1) * width];
        const std::uint8_t value = static_cast<std::uint8_t>(v);
        for (int x = 0; x < width; ++x) a[x] += row[x] == value;
      }
      if (++pending == 255) {
        flush(band);
        pending = 0;
      }
    }
    if (pending) flush(band);
  }
}

IndexHistogram BufferHistogram(const PatchBuffer& p, bool weight_by_amplitude) {
  IndexHistogram h;
  h.counts.assign(p.n_orient, 0.0);
  if (weight_by_amplitude) {
    for (std::size_t i = 0; i < p.indices.size(); ++i) {
      h.counts[p.indices[i] - 1] += p.amplitudes[i];
    }
  } else {
    std::vector<std::uint32_t> counts(p.n_orient, 0);
    CountCells(p.indices.data(), p.width, p.height, 1, p.n_orient, counts.data());
    for (int b = 0; b < p.n_orient; ++b) h.counts[b] = static_cast<double>(counts[b]);
  }
  return h;
}

// Grid histogram of the patch with every index v read as lut[v],
// L2-normalized.
std::optional<std::vector<float>> EncodeBuffer(const PatchBuffer& p, int grid,
                                               bool weight_by_amplitude,
                                               const std::vector<int>& lut) {
  RIFT2_CHECK_PARAM(grid >= 1, "grid must be >= 1");
  RIFT2_CHECK_PARAM(p.width > 0 && p.height > 0 && p.width % grid == 0 &&
                        p.height % grid == 0,
                    "patch does not divide into grid cells");
  const int n = p.n_orient;
  const int cell_w = p.width / grid;
  const int cell_h = p.height / grid;
  const std::size_t bins = static_cast<std::size_t>(grid) * grid * n;
  std::vector<double> hist(bins, 0.0);
  if (weight_by_amplitude) {
    for (int y = 0; y < p.height; ++y) {
      const std::size_t row = static_cast<std::size_t>(y / cell_h) * grid;
      const std::size_t at = static_cast<std::size_t>(y) * p.width;
      for (int cx = 0; cx < grid; ++cx) {
        double* h = &hist[(row + cx) * n];
        for (int x = cx * cell_w; x < (cx + 1) * cell_w; ++x) {
          h[lut[p.indices[at + x]] - 1] += p.amplitudes[at + x];
        }
      }
    }
  } else {
    // Count raw values per cell, then file each count under its mapped bin.
    std::vector<std::uint32_t> counts(bins, 0);
    CountCells(p.indices.data(), p.width, p.height, grid, n, counts.data());
    for (std::size_t cell = 0; cell < bins / n; ++cell) {
      for (int v = 1; v <= n; ++v) hist[cell * n + lut[v] - 1] += counts[cell * n + v - 1];
    }
  }
  double norm_sq = 0.0;
  for (const double v : hist) norm_sq += v * v;
  if (!(norm_sq > 0.0)) return std::nullopt;
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::vector<float> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b] = static_cast<float>(hist[b] * inv);
  return out;
}

// The index map resampled (nearest neighbor) on a lattice rotated by one
// angle about the map center. Canvas pixel u reads the map at
// center + R * (u - canvas_center), clamped to the map.
struct RotatedCanvas {
  double c = 1.0;
  double s = 0.0;
  int width = 0;
  int height = 0;
  double center_x = 0.0;
  double center_y = 0.0;
  std::vector<std::uint8_t> indices;
  std::vector<double> amplitudes;
};

RotatedCanvas BuildCanvas(const IndexMap& mim, double angle, bool with_amplitude) {
  RotatedCanvas cv;
  cv.c = SnapUnit(std::cos(angle));
  cv.s = SnapUnit(std::sin(angle));
  const int w = mim.Width();
  const int h = mim.Height();
  cv.width = static_cast<int>(std::ceil(std::abs(cv.c) * w + std::abs(cv.s) * h)) + 4;
  cv.height = static_cast<int>(std::ceil(std::abs(cv.s) * w + std::abs(cv.c) * h)) + 4;
  cv.center_x = 0.5 * (cv.width - 1);
  cv.center_y = 0.5 * (cv.height - 1);
  const double mx = 0.5 * (w - 1);
  const double my = 0.5 * (h - 1);
  const std::size_t n = static_cast<std::size_t>(cv.width) * cv.height;
  cv.indices.resize(n);
  cv.amplitudes.resize(with_amplitude ? n : 0);
  std::vector<std::int32_t> offsets(cv.width);
  for (int b = 0; b < cv.height; ++b) {
    const double dv = b - cv.center_y;
    for (int a = 0; a < cv.width; ++a) {
      const double du = a - cv.center_x;
      const double px = std::floor(mx + cv.c * du - cv.s * dv + 0.5);
      const double py = std::floor(my + cv.s * du + cv.c * dv + 0.5);
      const int x = static_cast<int>(std::clamp(px, 0.0, w - 1.0));
      const int y = static_cast<int>(std::clamp(py, 0.0, h - 1.0));
      offsets[a] = y * w + x;
    }
    const std::size_t at = static_cast<std::size_t>(b) * cv.width;
    for (int a = 0; a < cv.width; ++a) cv.indices[at + a] = mim.Indices()[offsets[a]];
    if (with_amplitude) {
      for (int a = 0; a < cv.width; ++a) cv.amplitudes[at + a] = mim.Amplitudes()[offsets[a]];
    }
  }
  return cv;
}

// Axis-aligned crop of the canvas whose lattice is nearest to the grid
// kp + R * (j - half, i - half). Returns false when the crop leaves the canvas.
bool CropCanvas(const RotatedCanvas& cv, const IndexMap& mim, const Keypoint& kp,
                int size, bool with_amplitude, PatchBuffer* out) {
  const double half = 0.5 * (size - 1);
  const double dx = kp.x - 0.5 * (mim.Width() - 1);
  const double dy = kp.y - 0.5 * (mim.Height() - 1);
  const double ux = cv.center_x + cv.c * dx + cv.s * dy - half;
  const double uy = cv.center_y - cv.s * dx + cv.c * dy - half;
  const long x0 = static_cast<long>(std::floor(ux + 0.5));
  const long y0 = static_cast<long>(std::floor(uy + 0.5));
  if (x0 < 0 || y0 < 0 || x0 + size > cv.width || y0 + size > cv.height) return false;
  const std::size_t n = static_cast<std::size_t>(size) * size;
  out->width = size;
  out->height = size;
  out->n_orient = mim.NumOrient();
  out->indices.resize(n);
  out->amplitudes.resize(with_amplitude ? n : 0);
  for (int i = 0; i < size; ++i) {
    const std::size_t from = static_cast<std::size_t>(y0 + i) * cv.width + x0;
    std::memcpy(&out->indices[static_cast<std::size_t>(i) * size], &cv.indices[from], size);
    if (with_amplitude) {
      std::memcpy(&out->amplitudes[static_cast<std::size_t>(i) * size], &cv.amplitudes[from],
                  size * sizeof(double));
    }
  }
  return true;
}

std::vector<int> IdentityLut(int n) {
  std::vector<int> lut(n + 1);
  for (int v = 0; v <= n; ++v) lut[v] = v;
  return lut;
}

using Describer =
    std::function<std::vector<Descriptor>(const Keypoint&, std::uint32_t)>;

// canvases[s] holds the map rotated by (s - 1) * pi / n_orient; empty when
// patches are not rotated.
std::vector<Descriptor> DescribeOneRift2(const IndexMap& mim,
                                         const std::vector<RotatedCanvas>& canvases,
                                         const Keypoint& kp, std::uint32_t id,
                                         const DescriptorConfig& config) {
  std::vector<Descriptor> out;
  const bool weighted = config.weight_by_amplitude;
  PatchBuffer axis;
  if (!SamplePatch(mim, kp, config.patch_size, 0.0, weighted, &axis)) return out;
  const IndexHistogram hist = BufferHistogram(axis, weighted);
  if (!(hist.Total() > 0.0)) return out;
  const int n = mim.NumOrient();
  std::vector<int> lut(n + 1, 0);
  PatchBuffer rotated;
  for (const int s : DominantIndices(hist, config.dominant_ratio)) {
    const PatchBuffer* patch = &axis;
    if (config.rotate_patch && s != 1) {
      const RotatedCanvas& cv = canvases[s];
      if (!PatchInside(mim, kp, config.patch_size, cv.c, cv.s)) continue;
      if (!CropCanvas(cv, mim, kp, config.patch_size, weighted, &rotated)) {
        SamplePatch(mim, kp, config.patch_size, (s - 1) * std::numbers::pi / n,
                    weighted, &rotated);
      }
      patch = &rotated;
    }
    for (int v = 1; v <= n; ++v) lut[v] = RecodeValue(v, s, n);
    auto vec = EncodeBuffer(*patch, config.grid, weighted, lut);
    if (!vec) continue;
    out.push_back({std::move(*vec), id, static_cast<std::uint8_t>(s),
                   DescriptorMode::kRift2});
  }
  return out;
}

std::vector<Descriptor> DescribeOneRing(const IndexMap& mim,
                                        const Keypoint& kp, std::uint32_t id,
                                        const DescriptorConfig& config) {
  std::vector<Descriptor> out;
  PatchBuffer patch;
  if (!SamplePatch(mim, kp, config.patch_size, 0.0, config.weight_by_amplitude, &patch)) {
    return out;
  }
  const int n = mim.NumOrient();
  std::vector<int> lut(n + 1, 0);
  for (int w = 1; w <= n; ++w) {
    for (int v = 1; v <= n; ++v) lut[v] = CyclicShiftValue(v, w, n);
    auto vec = EncodeBuffer(patch, config.grid, config.weight_by_amplitude, lut);
    if (!vec) return {};
    out.push_back({std::move(*vec), id, static_cast<std::uint8_t>(w),
                   DescriptorMode::kRing});
  }
  return out;
}

std::vector<Descriptor> DescribeOnePlain(const IndexMap& mim,
                                         const Keypoint& kp, std::uint32_t id,
                                         const DescriptorConfig& config) {
  std::vector<Descriptor> out;
  PatchBuffer patch;
  if (!SamplePatch(mim, kp, config.patch_size, 0.0, config.weight_by_amplitude, &patch)) {
    return out;
  }
  auto vec = EncodeBuffer(patch, config.grid, config.weight_by_amplitude,
                          IdentityLut(mim.NumOrient()));
  if (vec) out.push_back({std::move(*vec), id, 1, DescriptorMode::kPlain});
  return out;
}

std::vector<Descriptor> DescribeAll(const std::vector<Keypoint>& keypoints,
                                    DescribeStats* stats, const Describer& describe) {
  std::vector<std::vector<Descriptor>> per_keypoint(keypoints.size());
  ParallelFor(keypoints.size(), [&](std::size_t i) {
    per_keypoint[i] = describe(keypoints[i], static_cast<std::uint32_t>(i));
  });
  std::vector<Descriptor> out;
  DescribeStats local;
  local.keypoints_in = keypoints.size();
  for (auto& descs : per_keypoint) {
    if (descs.empty()) {
      ++local.keypoints_skipped;
      continue;
    }
    ++local.keypoints_kept;
    for (auto& d : descs) out.push_back(std::move(d));
  }
  local.descriptors = out.size();
  if (stats) *stats = local;
  return out;
}

}  // namespace

std::string_view ToString(DescriptorMode mode) {
  switch (mode) {
    case DescriptorMode::kRift2: return "rift2";
    case DescriptorMode::kRing: return "ring";
    case DescriptorMode::kPlain: return "plain";
  }
  return "unknown";
}

void DescriptorConfig::Validate() const {
  RIFT2_CHECK_PARAM(grid >= 1, "grid must be >= 1");
  RIFT2_CHECK_PARAM(patch_size >= grid && patch_size % grid == 0,
                    "patch_size must be a positive multiple of grid");
  RIFT2_CHECK_PARAM(dominant_ratio > 0.0 && dominant_ratio <= 1.0,
                    "dominant_ratio must lie in (0, 1]");
}


std::optional<IndexMap> ExtractPatch(const IndexMap& mim, const Keypoint& kp,
                                     int size, double angle) {
  PatchBuffer p;
  if (!SamplePatch(mim, kp, size, angle, true, &p)) return std::nullopt;
  return IndexMap(size, size, mim.NumOrient(), std::move(p.indices),
                  std::move(p.amplitudes));
}

std::optional<std::vector<float>> Encode(const IndexMap& patch, int grid,
                                         bool weight_by_amplitude) {
  RIFT2_CHECK_PARAM(grid >= 1, "grid must be >= 1");
  PatchBuffer p;
  p.width = patch.Width();
  p.height = patch.Height();
  p.n_orient = patch.NumOrient();
  p.indices.assign(patch.Indices().begin(), patch.Indices().end());
  if (weight_by_amplitude) {
    p.amplitudes.assign(patch.Amplitudes().begin(), patch.Amplitudes().end());
  }
  return EncodeBuffer(p, grid, weight_by_amplitude, IdentityLut(p.n_orient));
}

std::vector<Descriptor> DescribeRift2(const IndexMap& mim,
                                      const std::vector<Keypoint>& keypoints,
                                      const DescriptorConfig& config,
                                      DescribeStats* stats) {
  config.Validate();
  const int n = mim.NumOrient();
  std::vector<RotatedCanvas> canvases;
  if (config.rotate_patch && !keypoints.empty()) {
    canvases.resize(n + 1);
    ParallelFor(n - 1, [&](std::size_t k) {
      const int s = static_cast<int>(k) + 2;
      canvases[s] = BuildCanvas(mim, (s - 1) * std::numbers::pi / n,
                                config.weight_by_amplitude);
    });
  }
  return DescribeAll(keypoints, stats, [&](const Keypoint& kp, std::uint32_t id) {
    return DescribeOneRift2(mim, canvases, kp, id, config);
  });
}

std::vector<Descriptor> DescribeRing(const IndexMap& mim,
                                     const std::vector<Keypoint>& keypoints,
                                     const DescriptorConfig& config,
                                     DescribeStats* stats) {
  config.Validate();
  return DescribeAll(keypoints, stats, [&](const Keypoint& kp, std::uint32_t id) {
    return DescribeOneRing(mim, kp, id, config);
  });
}

std::vector<Descriptor> DescribePlain(const IndexMap& mim,
                                      const std::vector<Keypoint>& keypoints,
                                      const DescriptorConfig& config,
                                      DescribeStats* stats) {
  config.Validate();
  return DescribeAll(keypoints, stats, [&](const Keypoint& kp, std::uint32_t id) {
    return DescribeOnePlain(mim, kp, id, config);
  });
}

}  // namespace rift2
