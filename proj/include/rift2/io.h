#pragma once

// File formats: JSON for transforms, keypoints, matches, manifests and
// reports; CSV for matches and per-pair evaluation rows; a little-endian
// binary container for descriptors.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "rift2/config.h"
#include "rift2/descriptor.h"
#include "rift2/detector.h"
#include "rift2/evalbench.h"
#include "rift2/image.h"
#include "rift2/matcher.h"

namespace rift2 {

// {"rotation": [[r00, r01], [r10, r11]], "translation": [tx, ty]}
nlohmann::json ToJson(const RigidTransform& t);
RigidTransform RigidTransformFromJson(const nlohmann::json& j);

// [{"x": .., "y": .., "response": .., "kind": "corner" | "edge"}, ...]
nlohmann::json ToJson(const std::vector<Keypoint>& keypoints);
std::vector<Keypoint> KeypointsFromJson(const nlohmann::json& j);

// [{"ref": id, "tgt": id, "dist": ..}, ...]
nlohmann::json ToJson(const MatchSet& matches);
MatchSet MatchSetFromJson(const nlohmann::json& j);
// Header ref,tgt,dist.
std::string ToCsv(const MatchSet& matches);

// "∞" for the failure sentinel, a number otherwise.
nlohmann::json RmseToJson(const std::optional<double>& rmse);
std::string FormatRmse(const std::optional<double>& rmse);

nlohmann::json ToJson(const EvalReport& report, bool with_timing = true);
nlohmann::json ToJson(const DatasetSummary& summary, bool with_timing = true);
// Columns pair,mode,n,rmse,success,t_detect,t_describe,t_match.
std::string ToCsv(const DatasetSummary& summary, bool with_timing = true);
nlohmann::json ToJson(const BenchReport& report, const Config& config,
                      bool with_timing = true);

// [{"ref": path, "tgt": path, "gt": {...}, "direction": "ref_to_tgt"}, ...]
// Relative paths resolve against the manifest's directory. A direction of
// "tgt_to_ref" inverts gt. Throws FormatError on schema violations.
std::vector<DatasetPair> LoadManifest(const std::filesystem::path& path);

// Header {"RIF2", version u8, n_orient u8, grid u8, count u32}, then per
// descriptor {keypoint_id u32, variant u8, mode u8, grid^2 * n_orient f32}.
inline constexpr std::uint8_t kDescriptorFileVersion = 1;

struct DescriptorFile {
  int n_orient = 6;
  int grid = 6;
  std::vector<Descriptor> descriptors;
};

void WriteDescriptors(const std::filesystem::path& path,
                      const DescriptorFile& file);
DescriptorFile ReadDescriptors(const std::filesystem::path& path);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace rift2
