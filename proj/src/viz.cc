#include "rift2/viz.h"

#include <algorithm>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "rift2/error.h"

namespace rift2 {
namespace {

void Blit(const Image& img, cv::Mat* canvas, int x0) {
  for (int y = 0; y < img.Height(); ++y) {
    auto* row = canvas->ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.Width(); ++x) {
      const auto v = static_cast<unsigned char>(
          std::clamp(img(x, y), 0.0, 1.0) * 255.0 + 0.5);
      row[x0 + x] = cv::Vec3b(v, v, v);
    }
  }
}

}  // namespace

void SaveMatchVisualization(const Image& ref, const Image& tgt,
                            const std::vector<Keypoint>& ref_keypoints,
                            const std::vector<Keypoint>& tgt_keypoints,
                            const MatchSet& matches,
                            const std::optional<std::vector<std::size_t>>& drawn,
                            const std::filesystem::path& path) {
  const int height = std::max(ref.Height(), tgt.Height());
  cv::Mat canvas(height, ref.Width() + tgt.Width(), CV_8UC3, cv::Scalar(0, 0, 0));
  Blit(ref, &canvas, 0);
  Blit(tgt, &canvas, ref.Width());

  const cv::Scalar red(0, 0, 255), green(0, 255, 0), yellow(0, 255, 255);
  const cv::Point2d offset(ref.Width(), 0);
  for (const Keypoint& k : ref_keypoints) {
    cv::circle(canvas, cv::Point2d(k.x, k.y), 3, red, 1, cv::LINE_AA);
  }
  for (const Keypoint& k : tgt_keypoints) {
    cv::drawMarker(canvas, cv::Point2d(k.x, k.y) + offset, green,
                   cv::MARKER_CROSS, 6, 1);
  }
  auto draw = [&](const Match& m) {
    if (m.ref >= ref_keypoints.size() || m.tgt >= tgt_keypoints.size()) {
      throw IntegrityError("match references an unknown keypoint");
    }
    const Keypoint& r = ref_keypoints[m.ref];
    const Keypoint& t = tgt_keypoints[m.tgt];
    cv::line(canvas, cv::Point2d(r.x, r.y), cv::Point2d(t.x, t.y) + offset,
             yellow, 1, cv::LINE_AA);
  };
  if (drawn) {
    for (const std::size_t i : *drawn) draw(matches.pairs.at(i));
  } else {
    for (const Match& m : matches.pairs) draw(m);
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), canvas);
  } catch (const cv::Exception&) {
  }
  if (!ok) throw IoError("cannot write visualization " + path.string());
}

}  // namespace rift2
