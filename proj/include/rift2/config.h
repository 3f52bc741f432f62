#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rift2/descriptor.h"
#include "rift2/detector.h"
#include "rift2/loggabor.h"

namespace rift2 {

enum class MatchMode { kRift2, kRing };

std::string_view ToString(MatchMode mode);
MatchMode MatchModeFromString(std::string_view s);

struct EvalConfig {
  double residual_threshold = 3.0;
  int success_min_matches = 10;
  double rmse_cap = 20.0;

  void Validate() const;
};

// Every tunable of the pipeline. Defaults reproduce the published RIFT2
// settings: 5000 keypoints, 96 px patches, FAST threshold 0.001, dominant
// ratio 0.8.
struct Config {
  BankParams bank;
  DetectorConfig detector;
  DescriptorConfig descriptor;
  EvalConfig eval;
  MatchMode mode = MatchMode::kRift2;

  // Applies one `key = value` setting. Unknown keys and malformed values
  // throw ParameterError.
  void Set(std::string_view key, std::string_view value);

  // Cross-module consistency (patch size is shared by detector and
  // descriptor) plus each module's own checks.
  void Validate() const;

  // Flat key = value text, one key per line, in a stable order. Parsing the
  // result reproduces this config.
  std::string ToText() const;
};

// Flat `key = value` lines; '#' starts a comment, blank lines are ignored.
// Keys override `base`.
Config ParseConfigText(std::string_view text, Config base = {});
Config LoadConfigFile(const std::filesystem::path& path, Config base = {});

}  // namespace rift2
