#include "rift2/matcher.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Core>

#include "rift2/error.h"
#include "rift2/parallel.h"

namespace rift2 {
namespace {

using MatrixXfCol = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic>;

constexpr Eigen::Index kTgtBlock = 512;
constexpr Eigen::Index kRefBlock = 4096;
// Screening slack on squared distances; covers float GEMM rounding for unit
// descriptors by several orders of magnitude.
constexpr float kScreenSlack = 1e-3f;

MatrixXfCol Pack(const std::vector<Descriptor>& descs, std::size_t dim) {
  MatrixXfCol m(static_cast<Eigen::Index>(dim),
                static_cast<Eigen::Index>(descs.size()));
  for (std::size_t i = 0; i < descs.size(); ++i) {
    if (descs[i].vector.size() != dim) {
      throw ParameterError("descriptor dimensions differ");
    }
    std::copy(descs[i].vector.begin(), descs[i].vector.end(),
              m.col(static_cast<Eigen::Index>(i)).data());
  }
  return m;
}

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::uint32_t ref_keypoint = 0;
};

}  // namespace

double DescriptorDistance(const std::vector<float>& a,
                          const std::vector<float>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

MatchSet MatchNearest(const std::vector<Descriptor>& ref_descs,
                      const std::vector<Descriptor>& tgt_descs) {
  if (ref_descs.empty() || tgt_descs.empty()) {
    throw ParameterError("cannot match an empty descriptor set");
  }
  const std::size_t dim = ref_descs.front().vector.size();
  const MatrixXfCol ref = Pack(ref_descs, dim);
  const MatrixXfCol tgt = Pack(tgt_descs, dim);
  const Eigen::RowVectorXf ref_sq = ref.colwise().squaredNorm();

  const Eigen::Index n_ref = ref.cols();
  const Eigen::Index n_tgt = tgt.cols();
  std::vector<Nearest> nearest(static_cast<std::size_t>(n_tgt));

  const auto n_blocks =
      static_cast<std::size_t>((n_tgt + kTgtBlock - 1) / kTgtBlock);
  ParallelFor(n_blocks, [&](std::size_t block) {
    const Eigen::Index t0 = static_cast<Eigen::Index>(block) * kTgtBlock;
    const Eigen::Index tn = std::min(kTgtBlock, n_tgt - t0);
    // Screening score: |r|^2 - 2 t.r, i.e. squared distance minus |t|^2.
    std::vector<float> best(tn, std::numeric_limits<float>::infinity());
    std::vector<std::vector<std::pair<float, Eigen::Index>>> candidates(tn);
    MatrixXfCol dots;
    for (Eigen::Index r0 = 0; r0 < n_ref; r0 += kRefBlock) {
      const Eigen::Index rn = std::min(kRefBlock, n_ref - r0);
      dots.noalias() =
          tgt.middleCols(t0, tn).transpose() * ref.middleCols(r0, rn);
      for (Eigen::Index j = 0; j < rn; ++j) {
        const float rs = ref_sq[r0 + j];
        const float* col = dots.col(j).data();
        for (Eigen::Index i = 0; i < tn; ++i) {
          const float score = rs - 2.0f * col[i];
          if (score <= best[i] + kScreenSlack) {
            if (score < best[i]) best[i] = score;
            candidates[i].emplace_back(score, r0 + j);
          }
        }
      }
      // Drop candidates that fell out of the window.
      for (Eigen::Index i = 0; i < tn; ++i) {
        auto& c = candidates[i];
        const float limit = best[i] + kScreenSlack;
        c.erase(std::remove_if(c.begin(), c.end(),
                               [&](const auto& e) { return e.first > limit; }),
                c.end());
      }
    }
    for (Eigen::Index i = 0; i < tn; ++i) {
      Nearest& out = nearest[static_cast<std::size_t>(t0 + i)];
      const auto& t = tgt_descs[static_cast<std::size_t>(t0 + i)].vector;
      for (const auto& [score, j] : candidates[i]) {
        const Descriptor& r = ref_descs[static_cast<std::size_t>(j)];
        const double d = DescriptorDistance(t, r.vector);
        if (d < out.distance ||
            (d == out.distance && r.keypoint_id < out.ref_keypoint)) {
          out.distance = d;
          out.ref_keypoint = r.keypoint_id;
        }
      }
    }
  });

  // Collapse descriptor variants to target keypoints.
  std::map<std::uint32_t, Nearest> per_keypoint;
  for (std::size_t i = 0; i < tgt_descs.size(); ++i) {
    const std::uint32_t id = tgt_descs[i].keypoint_id;
    const Nearest& cand = nearest[i];
    auto [it, inserted] = per_keypoint.try_emplace(id, cand);
    if (!inserted) {
      Nearest& cur = it->second;
      if (cand.distance < cur.distance ||
          (cand.distance == cur.distance &&
           cand.ref_keypoint < cur.ref_keypoint)) {
        cur = cand;
      }
    }
  }

  MatchSet result;
  result.mode = ref_descs.front().mode;
  result.distance_evals =
      static_cast<std::uint64_t>(n_ref) * static_cast<std::uint64_t>(n_tgt);
  result.pairs.reserve(per_keypoint.size());
  for (const auto& [tgt_id, best] : per_keypoint) {
    result.pairs.push_back({best.ref_keypoint, tgt_id, best.distance});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const Match& a, const Match& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              if (a.tgt != b.tgt) return a.tgt < b.tgt;
              return a.ref < b.ref;
            });
  return result;
}

}  // namespace rift2
