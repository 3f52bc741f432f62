#include "rift2/mim.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "rift2/error.h"

namespace rift2 {

IndexMap::IndexMap(int width, int height, int n_orient)
    : width_(width),
      height_(height),
      n_orient_(n_orient),
      indices_(static_cast<std::size_t>(width) * height, 1),
      max_amplitude_(indices_.size(), 0.0) {
  RIFT2_CHECK_PARAM(width >= 0 && height >= 0, "negative index map size");
  RIFT2_CHECK_PARAM(n_orient >= 2 && n_orient <= 255,
                    "n_orient must lie in [2, 255]");
}

IndexMap::IndexMap(int width, int height, int n_orient,
                   std::vector<std::uint8_t> indices,
                   std::vector<double> max_amplitude)
    : width_(width),
      height_(height),
      n_orient_(n_orient),
      indices_(std::move(indices)),
      max_amplitude_(std::move(max_amplitude)) {
  RIFT2_CHECK_PARAM(n_orient >= 2 && n_orient <= 255,
                    "n_orient must lie in [2, 255]");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  RIFT2_CHECK_PARAM(indices_.size() == n && max_amplitude_.size() == n,
                    "index map data length does not match dimensions");
  for (const std::uint8_t v : indices_) {
    RIFT2_CHECK_PARAM(v >= 1 && v <= n_orient, "index outside [1, n_orient]");
  }
}

IndexMap IndexMap::Crop(int x0, int y0, int w, int h) const {
  RIFT2_CHECK_PARAM(x0 >= 0 && y0 >= 0 && w >= 0 && h >= 0 &&
                        x0 + w <= width_ && y0 + h <= height_,
                    "crop region exceeds the index map");
  IndexMap out(w, h, n_orient_);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.Index(x, y) = Index(x0 + x, y0 + y);
      out.Amplitude(x, y) = Amplitude(x0 + x, y0 + y);
    }
  }
  return out;
}

IndexMap BuildMim(std::span<const Image> a_o) {
  RIFT2_CHECK_PARAM(a_o.size() >= 2, "need at least two orientation channels");
  RIFT2_CHECK_PARAM(a_o.size() <= 255, "too many orientation channels");
  const int w = a_o[0].Width();
  const int h = a_o[0].Height();
  for (const Image& channel : a_o) {
    if (channel.Width() != w || channel.Height() != h) {
      throw ParameterError("orientation channels differ in size");
    }
  }
  const int n = static_cast<int>(a_o.size());
  IndexMap mim(w, h, n);
  auto indices = mim.Indices();
  auto amplitude = mim.Amplitudes();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    int best = 0;
    double best_value = a_o[0].Data()[i];
    for (int o = 1; o < n; ++o) {
      const double v = a_o[o].Data()[i];
      if (v > best_value) {
        best_value = v;
        best = o;
      }
    }
    indices[i] = static_cast<std::uint8_t>(best + 1);
    amplitude[i] = best_value;
  }
  return mim;
}

double IndexHistogram::Total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

IndexHistogram PatchHistogram(const IndexMap& patch, bool weight_by_amplitude) {
  RIFT2_CHECK_PARAM(patch.NumPixels() > 0, "empty patch");
  IndexHistogram h;
  h.counts.assign(patch.NumOrient(), 0.0);
  const auto indices = patch.Indices();
  const auto amplitude = patch.Amplitudes();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    h.counts[indices[i] - 1] += weight_by_amplitude ? amplitude[i] : 1.0;
  }
  return h;
}

std::vector<int> DominantIndices(const IndexHistogram& h, double ratio) {
  RIFT2_CHECK_PARAM(ratio > 0.0 && ratio <= 1.0,
                    "dominant ratio must lie in (0, 1]");
  RIFT2_CHECK_PARAM(!h.counts.empty(), "empty histogram");
  const auto peak = std::max_element(h.counts.begin(), h.counts.end());
  if (!(*peak > 0.0)) throw ParameterError("all-zero histogram");
  const int s = static_cast<int>(peak - h.counts.begin());

  int second = -1;
  for (int b = 0; b < static_cast<int>(h.counts.size()); ++b) {
    if (b == s) continue;
    if (second < 0 || h.counts[b] > h.counts[second]) second = b;
  }
  std::vector<int> result{s + 1};
  // Relative slack keeps the boundary inclusive despite rounding of ratio.
  if (second >= 0 && h.counts[second] > 0.0 &&
      h.counts[second] >= ratio * *peak * (1.0 - 1e-12)) {
    result.push_back(second + 1);
  }
  return result;
}

IndexMap Recode(const IndexMap& patch, int s) {
  const int n = patch.NumOrient();
  RIFT2_CHECK_PARAM(s >= 1 && s <= n, "dominant index out of range");
  IndexMap out = patch;
  for (std::uint8_t& v : out.Indices()) {
    v = static_cast<std::uint8_t>(RecodeValue(v, s, n));
  }
  return out;
}

IndexMap CyclicShift(const IndexMap& patch, int w) {
  const int n = patch.NumOrient();
  RIFT2_CHECK_PARAM(w >= 1 && w <= n, "initial layer out of range");
  IndexMap out = patch;
  for (std::uint8_t& v : out.Indices()) {
    v = static_cast<std::uint8_t>(CyclicShiftValue(v, w, n));
  }
  return out;
}

IndexHistogram CyclicShift(const IndexHistogram& h, int w) {
  const int n = static_cast<int>(h.counts.size());
  RIFT2_CHECK_PARAM(w >= 1 && w <= n, "initial layer out of range");
  IndexHistogram out;
  out.counts.assign(n, 0.0);
  for (int v = 1; v <= n; ++v) {
    out.counts[CyclicShiftValue(v, w, n) - 1] += h.counts[v - 1];
  }
  return out;
}

void SaveIndexMapPgm(const IndexMap& mim, const std::filesystem::path& path) {
  const double step = static_cast<double>(255 / mim.NumOrient()) / 255.0;
  Image img(mim.Width(), mim.Height());
  const auto indices = mim.Indices();
  auto dst = img.Data();
  for (std::size_t i = 0; i < indices.size(); ++i) dst[i] = indices[i] * step;
  SaveImage(img, path);
}

}  // namespace rift2
