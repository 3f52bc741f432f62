#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rift2/detector.h"
#include "rift2/image.h"
#include "rift2/matcher.h"

namespace rift2 {

// Side-by-side color rendering: reference on the left with keypoints as red
// circles, target on the right with green crosshairs, and a yellow line per
// drawn match. `drawn` selects entries of matches.pairs; nullopt draws all.
void SaveMatchVisualization(const Image& ref, const Image& tgt,
                            const std::vector<Keypoint>& ref_keypoints,
                            const std::vector<Keypoint>& tgt_keypoints,
                            const MatchSet& matches,
                            const std::optional<std::vector<std::size_t>>& drawn,
                            const std::filesystem::path& path);

}  // namespace rift2
