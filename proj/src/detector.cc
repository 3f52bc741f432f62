#include "rift2/detector.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "rift2/error.h"

namespace rift2 {
namespace {

constexpr int kArc = 9;
constexpr int kCircle = 16;
constexpr std::array<std::array<int, 2>, kCircle> kCircleOffsets = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

// Maps whose dynamic range falls below this are treated as constant.
constexpr double kMinMapRange = 1e-8;

bool ResponseOrder(const Keypoint& a, const Keypoint& b) {
  if (a.response != b.response) return a.response > b.response;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.kind < b.kind;
}

}  // namespace

std::string_view ToString(KeypointKind kind) {
  return kind == KeypointKind::kCorner ? "corner" : "edge";
}

KeypointKind KeypointKindFromString(std::string_view s) {
  if (s == "corner") return KeypointKind::kCorner;
  if (s == "edge") return KeypointKind::kEdge;
  throw FormatError("unknown keypoint kind: " + std::string(s));
}

Image FastResponse(const Image& map) {
  const int w = map.Width();
  const int h = map.Height();
  Image response(w, h);
  std::array<double, kCircle + kArc - 1> ring{};
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const double center = map(x, y);
      for (int i = 0; i < kCircle; ++i) {
        ring[i] = map(x + kCircleOffsets[i][0], y + kCircleOffsets[i][1]) -
                  center;
      }
      for (int i = kCircle; i < kCircle + kArc - 1; ++i) {
        ring[i] = ring[i - kCircle];
      }
      double best = 0.0;
      for (int start = 0; start < kCircle; ++start) {
        double brighter = ring[start];
        double darker = -ring[start];
        for (int j = 1; j < kArc; ++j) {
          brighter = std::min(brighter, ring[start + j]);
          darker = std::min(darker, -ring[start + j]);
        }
        best = std::max({best, brighter, darker});
      }
      response(x, y) = best;
    }
  }
  return response;
}

std::vector<Keypoint> DetectFast(const Image& map, const FastOptions& options,
                                 KeypointKind kind) {
  RIFT2_CHECK_PARAM(options.threshold > 0.0, "FAST threshold must be > 0");
  RIFT2_CHECK_PARAM(options.max_points >= 0, "max_points must be >= 0");
  for (const double v : map.Data()) {
    RIFT2_CHECK_PARAM(std::isfinite(v), "FAST score map must be finite");
  }

  const Image response = FastResponse(NormalizeMinMax(map, kMinMapRange));
  const int w = map.Width();
  const int h = map.Height();
  const int lo = std::max(options.border_margin, 3);

  // 3x3 non-maximum suppression in raster order: a point falls to any
  // strictly stronger neighbor, and to an equal one already kept.
  std::vector<Keypoint> points;
  std::vector<std::uint8_t> kept(static_cast<std::size_t>(w) * h, 0);
  for (int y = lo; y <= h - 1 - lo; ++y) {
    for (int x = lo; x <= w - 1 - lo; ++x) {
      const double r = response(x, y);
      if (!(r > options.threshold)) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double q = response(x + dx, y + dy);
          const bool precedes = dy < 0 || (dy == 0 && dx < 0);
          const bool neighbor_kept =
              precedes && kept[static_cast<std::size_t>(y + dy) * w + x + dx];
          if (q > r || (q == r && neighbor_kept)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        kept[static_cast<std::size_t>(y) * w + x] = 1;
        points.push_back({double(x), double(y), r, kind});
      }
    }
  }
  std::sort(points.begin(), points.end(), ResponseOrder);
  if (points.size() > static_cast<std::size_t>(options.max_points)) {
    points.resize(options.max_points);
  }
  return points;
}

void DetectorConfig::Validate() const {
  RIFT2_CHECK_PARAM(threshold > 0.0, "FAST threshold must be > 0");
  RIFT2_CHECK_PARAM(max_points >= 0, "max_points must be >= 0");
  RIFT2_CHECK_PARAM(patch_size >= 2, "patch_size must be >= 2");
  RIFT2_CHECK_PARAM(merge_radius >= 0.0, "merge_radius must be >= 0");
}

std::vector<Keypoint> DetectKeypoints(const PCField& pc,
                                      const DetectorConfig& config) {
  config.Validate();
  const int w = pc.moment_min.Width();
  const int h = pc.moment_min.Height();
  if (w < config.patch_size || h < config.patch_size) {
    throw ParameterError("image is smaller than the descriptor patch");
  }
  const FastOptions options{config.threshold, config.max_points,
                            config.patch_size / 2};
  std::vector<Keypoint> all =
      DetectFast(pc.moment_min, options, KeypointKind::kCorner);
  const std::vector<Keypoint> edges =
      DetectFast(pc.moment_max, options, KeypointKind::kEdge);
  all.insert(all.end(), edges.begin(), edges.end());
  std::sort(all.begin(), all.end(), ResponseOrder);

  // Greedy cross-kind suppression on a hash grid of merge_radius cells.
  const double radius = config.merge_radius;
  const double cell = std::max(radius, 1.0);
  auto key = [&](long cx, long cy) { return (cx << 32) ^ (cy & 0xffffffffL); };
  std::unordered_map<long, std::vector<std::size_t>> grid;
  std::vector<Keypoint> kept;
  kept.reserve(std::min<std::size_t>(all.size(), config.max_points));
  for (const Keypoint& kp : all) {
    if (kept.size() >= static_cast<std::size_t>(config.max_points)) break;
    const long cx = static_cast<long>(std::floor(kp.x / cell));
    const long cy = static_cast<long>(std::floor(kp.y / cell));
    bool duplicate = false;
    for (long gy = cy - 1; gy <= cy + 1 && !duplicate; ++gy) {
      for (long gx = cx - 1; gx <= cx + 1 && !duplicate; ++gx) {
        const auto it = grid.find(key(gx, gy));
        if (it == grid.end()) continue;
        for (const std::size_t j : it->second) {
          const Keypoint& other = kept[j];
          if (other.kind != kp.kind &&
              std::hypot(other.x - kp.x, other.y - kp.y) <= radius) {
            duplicate = true;
            break;
          }
        }
      }
    }
    if (duplicate) continue;
    grid[key(cx, cy)].push_back(kept.size());
    kept.push_back(kp);
  }
  return kept;
}

}  // namespace rift2
