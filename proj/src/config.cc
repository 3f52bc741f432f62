#include "rift2/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rift2/error.h"

namespace rift2 {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string_view Unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  throw ParameterError("invalid value '" + std::string(value) + "' for key '" +
                       std::string(key) + "'");
}

double ParseDouble(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(v)) {
    BadValue(key, value);
  }
  return v;
}

int ParseInt(std::string_view key, std::string_view value) {
  int v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value);
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  BadValue(key, value);
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Fixed choices that are surfaced so that saved configs are self-describing.
constexpr std::string_view kPcVariant = "phase_deviation";
constexpr std::string_view kEdgeSampler = "fast";

}  // namespace

std::string_view ToString(MatchMode mode) {
  return mode == MatchMode::kRift2 ? "rift2" : "ring";
}

MatchMode MatchModeFromString(std::string_view s) {
  if (s == "rift2") return MatchMode::kRift2;
  if (s == "ring") return MatchMode::kRing;
  throw ParameterError("unknown mode '" + std::string(s) +
                       "' (expected rift2 or ring)");
}

void EvalConfig::Validate() const {
  RIFT2_CHECK_PARAM(residual_threshold > 0.0, "residual_threshold must be > 0");
  RIFT2_CHECK_PARAM(success_min_matches >= 1,
                    "success_min_matches must be >= 1");
  RIFT2_CHECK_PARAM(rmse_cap > 0.0, "rmse_cap must be > 0");
}

void Config::Set(std::string_view key, std::string_view raw) {
  const std::string_view value = Unquote(Trim(raw));
  using Setter = std::function<void(Config&, std::string_view, std::string_view)>;
  static const std::map<std::string, Setter, std::less<>> kSetters = {
      {"n_scales", [](Config& c, auto k, auto v) { c.bank.n_scales = ParseInt(k, v); }},
      {"n_orient", [](Config& c, auto k, auto v) { c.bank.n_orient = ParseInt(k, v); }},
      {"min_wavelength", [](Config& c, auto k, auto v) { c.bank.min_wavelength = ParseDouble(k, v); }},
      {"scale_mult", [](Config& c, auto k, auto v) { c.bank.scale_mult = ParseDouble(k, v); }},
      {"sigma_on_f", [](Config& c, auto k, auto v) { c.bank.sigma_on_f = ParseDouble(k, v); }},
      {"orientation_spread", [](Config& c, auto k, auto v) { c.bank.orientation_spread = ParseDouble(k, v); }},
      {"noise_k", [](Config& c, auto k, auto v) { c.bank.noise_k = ParseDouble(k, v); }},
      {"pc_variant", [](Config&, auto k, auto v) { if (v != kPcVariant) BadValue(k, v); }},
      {"fast_threshold", [](Config& c, auto k, auto v) { c.detector.threshold = ParseDouble(k, v); }},
      {"max_keypoints", [](Config& c, auto k, auto v) { c.detector.max_points = ParseInt(k, v); }},
      {"patch_size", [](Config& c, auto k, auto v) {
         c.detector.patch_size = c.descriptor.patch_size = ParseInt(k, v);
       }},
      {"merge_radius", [](Config& c, auto k, auto v) { c.detector.merge_radius = ParseDouble(k, v); }},
      {"edge_sampler", [](Config&, auto k, auto v) { if (v != kEdgeSampler) BadValue(k, v); }},
      {"grid", [](Config& c, auto k, auto v) { c.descriptor.grid = ParseInt(k, v); }},
      {"dominant_ratio", [](Config& c, auto k, auto v) { c.descriptor.dominant_ratio = ParseDouble(k, v); }},
      {"rotate_patch", [](Config& c, auto k, auto v) { c.descriptor.rotate_patch = ParseBool(k, v); }},
      {"weight_by_amplitude", [](Config& c, auto k, auto v) { c.descriptor.weight_by_amplitude = ParseBool(k, v); }},
      {"residual_threshold", [](Config& c, auto k, auto v) { c.eval.residual_threshold = ParseDouble(k, v); }},
      {"success_min_matches", [](Config& c, auto k, auto v) { c.eval.success_min_matches = ParseInt(k, v); }},
      {"rmse_cap", [](Config& c, auto k, auto v) { c.eval.rmse_cap = ParseDouble(k, v); }},
      {"mode", [](Config& c, auto, auto v) { c.mode = MatchModeFromString(v); }},
  };
  const auto it = kSetters.find(Trim(key));
  if (it == kSetters.end()) {
    throw ParameterError("unknown config key '" + std::string(Trim(key)) + "'");
  }
  it->second(*this, Trim(key), value);
}

void Config::Validate() const {
  bank.Validate();
  detector.Validate();
  descriptor.Validate();
  eval.Validate();
  RIFT2_CHECK_PARAM(detector.patch_size == descriptor.patch_size,
                    "detector and descriptor patch sizes differ");
}

std::string Config::ToText() const {
  std::ostringstream out;
  out << "n_scales = " << bank.n_scales << '\n'
      << "n_orient = " << bank.n_orient << '\n'
      << "min_wavelength = " << FormatDouble(bank.min_wavelength) << '\n'
      << "scale_mult = " << FormatDouble(bank.scale_mult) << '\n'
      << "sigma_on_f = " << FormatDouble(bank.sigma_on_f) << '\n'
      << "orientation_spread = " << FormatDouble(bank.orientation_spread) << '\n'
      << "noise_k = " << FormatDouble(bank.noise_k) << '\n'
      << "pc_variant = " << kPcVariant << '\n'
      << "fast_threshold = " << FormatDouble(detector.threshold) << '\n'
      << "max_keypoints = " << detector.max_points << '\n'
      << "patch_size = " << detector.patch_size << '\n'
      << "merge_radius = " << FormatDouble(detector.merge_radius) << '\n'
      << "edge_sampler = " << kEdgeSampler << '\n'
      << "grid = " << descriptor.grid << '\n'
      << "dominant_ratio = " << FormatDouble(descriptor.dominant_ratio) << '\n'
      << "rotate_patch = " << (descriptor.rotate_patch ? "true" : "false") << '\n'
      << "weight_by_amplitude = "
      << (descriptor.weight_by_amplitude ? "true" : "false") << '\n'
      << "residual_threshold = " << FormatDouble(eval.residual_threshold) << '\n'
      << "success_min_matches = " << eval.success_min_matches << '\n'
      << "rmse_cap = " << FormatDouble(eval.rmse_cap) << '\n'
      << "mode = " << ToString(mode) << '\n';
  return out.str();
}

Config ParseConfigText(std::string_view text, Config base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) +
                           ": expected key = value");
    }
    base.Set(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

Config LoadConfigFile(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str(), std::move(base));
}

}  // namespace rift2
