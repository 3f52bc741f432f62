#include "rift2/io.h"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rift2/error.h"

namespace rift2 {
namespace {

using nlohmann::json;

constexpr std::array<char, 4> kMagic = {'R', 'I', 'F', '2'};
constexpr const char* kInfinity = "∞";

std::string FormatNumber(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double RequireNumber(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string("expected number for ") + what);
  return j.get<double>();
}

void PutU32(std::string* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

json TimingJson(const StageTimings& t) {
  return {{"detect", t.detect}, {"describe", t.describe}, {"match", t.match}};
}

}  // namespace

json ToJson(const RigidTransform& t) {
  return {{"rotation",
           {{t.rotation(0, 0), t.rotation(0, 1)}, {t.rotation(1, 0), t.rotation(1, 1)}}},
          {"translation", {t.translation.x(), t.translation.y()}}};
}

RigidTransform RigidTransformFromJson(const json& j) {
  if (!j.is_object() || !j.contains("rotation") || !j.contains("translation")) {
    throw FormatError("transform needs 'rotation' and 'translation'");
  }
  const json& r = j.at("rotation");
  const json& t = j.at("translation");
  if (!r.is_array() || r.size() != 2 || !r[0].is_array() || r[0].size() != 2 ||
      !r[1].is_array() || r[1].size() != 2 || !t.is_array() || t.size() != 2) {
    throw FormatError("rotation must be 2x2 and translation a 2-vector");
  }
  RigidTransform out;
  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col < 2; ++col) {
      out.rotation(row, col) = RequireNumber(r[row][col], "rotation entry");
    }
  }
  out.translation = {RequireNumber(t[0], "translation"),
                     RequireNumber(t[1], "translation")};
  try {
    out.Validate();
  } catch (const ParameterError& e) {
    throw FormatError(e.what());
  }
  return out;
}

json ToJson(const std::vector<Keypoint>& keypoints) {
  json out = json::array();
  for (const Keypoint& k : keypoints) {
    out.push_back({{"x", k.x}, {"y", k.y}, {"response", k.response},
                   {"kind", std::string(ToString(k.kind))}});
  }
  return out;
}

std::vector<Keypoint> KeypointsFromJson(const json& j) {
  if (!j.is_array()) throw FormatError("keypoints must be a JSON array");
  std::vector<Keypoint> out;
  out.reserve(j.size());
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("kind") || !e.at("kind").is_string()) {
      throw FormatError("malformed keypoint entry");
    }
    out.push_back({RequireNumber(e.value("x", json()), "x"),
                   RequireNumber(e.value("y", json()), "y"),
                   RequireNumber(e.value("response", json()), "response"),
                   KeypointKindFromString(e.at("kind").get<std::string>())});
  }
  return out;
}

json ToJson(const MatchSet& matches) {
  json out = json::array();
  for (const Match& m : matches.pairs) {
    out.push_back({{"ref", m.ref}, {"tgt", m.tgt}, {"dist", m.distance}});
  }
  return out;
}

MatchSet MatchSetFromJson(const json& j) {
  if (!j.is_array()) throw FormatError("matches must be a JSON array");
  MatchSet out;
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("ref") || !e.contains("tgt") ||
        !e.at("ref").is_number_unsigned() || !e.at("tgt").is_number_unsigned()) {
      throw FormatError("malformed match entry");
    }
    out.pairs.push_back({e.at("ref").get<std::uint32_t>(),
                         e.at("tgt").get<std::uint32_t>(),
                         RequireNumber(e.value("dist", json()), "dist")});
  }
  return out;
}

std::string ToCsv(const MatchSet& matches) {
  std::string out = "ref,tgt,dist\n";
  for (const Match& m : matches.pairs) {
    out += std::to_string(m.ref) + ',' + std::to_string(m.tgt) + ',' +
           FormatNumber(m.distance) + '\n';
  }
  return out;
}

json RmseToJson(const std::optional<double>& rmse) {
  return rmse ? json(*rmse) : json(kInfinity);
}

std::string FormatRmse(const std::optional<double>& rmse) {
  return rmse ? FormatNumber(*rmse) : std::string(kInfinity);
}

json ToJson(const EvalReport& r, bool with_timing) {
  json out = {{"n_correct", r.n_correct},
              {"rmse", RmseToJson(r.rmse)},
              {"success", r.success},
              {"n_matches_total", r.n_matches_total},
              {"residual_threshold", r.residual_threshold},
              {"descriptor_counts", {{"ref", r.ref_descriptors}, {"tgt", r.tgt_descriptors}}}};
  if (with_timing) out["timings"] = TimingJson(r.timings);
  return out;
}

json ToJson(const DatasetSummary& s, bool with_timing) {
  json pairs = json::array();
  for (const PairOutcome& o : s.per_pair) {
    json p = ToJson(o.report, with_timing);
    p["pair"] = o.name;
    if (o.error) p["error"] = *o.error;
    pairs.push_back(std::move(p));
  }
  json out = {{"mode", std::string(ToString(s.mode))},
              {"pairs", s.pairs},
              {"successes", s.successes},
              {"success_rate", s.success_rate},
              {"mean_n", s.mean_n},
              {"mean_n_success", s.mean_n_success},
              {"mean_rmse", s.mean_rmse},
              {"per_pair", std::move(pairs)}};
  if (with_timing) out["mean_seconds"] = s.mean_seconds;
  return out;
}

std::string ToCsv(const DatasetSummary& s, bool with_timing) {
  std::string out = "pair,mode,n,rmse,success,t_detect,t_describe,t_match\n";
  const std::string mode(ToString(s.mode));
  for (const PairOutcome& o : s.per_pair) {
    const EvalReport& r = o.report;
    const StageTimings& t = r.timings;
    out += o.name + ',' + mode + ',' + std::to_string(r.n_correct) + ',' +
           FormatRmse(r.rmse) + ',' + (r.success ? "true" : "false") + ',';
    // Timing cells stay empty for reproducible output.
    if (with_timing) {
      out += FormatNumber(t.detect) + ',' + FormatNumber(t.describe) + ',' +
             FormatNumber(t.match);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

json ToJson(const BenchReport& b, const Config& config, bool with_timing) {
  const int n_orient = config.bank.n_orient;
  const std::size_t dim = static_cast<std::size_t>(config.descriptor.grid) *
                          config.descriptor.grid * n_orient;
  auto mode_json = [&](const ModeBench& m) {
    json out = {{"ref_descriptors", m.ref_descriptors},
                {"tgt_descriptors", m.tgt_descriptors},
                {"distance_evals", m.distance_evals},
                {"descriptor_bytes",
                 (m.ref_descriptors + m.tgt_descriptors) * dim * sizeof(float)}};
    if (with_timing) {
      out["describe_seconds"] = m.describe_seconds;
      out["match_seconds"] = m.match_seconds;
      out["seconds"] = m.Seconds();
    }
    if (m.eval) out["eval"] = ToJson(*m.eval, false);
    return out;
  };
  json out = {{"ref_keypoints", b.ref_keypoints},
              {"tgt_keypoints", b.tgt_keypoints},
              {"descs_ring", b.ring.ref_descriptors},
              {"descs_rift2", b.rift2.ref_descriptors},
              {"distance_evals_ring", b.ring.distance_evals},
              {"distance_evals_rift2", b.rift2.distance_evals},
              {"distance_evals_plain", b.distance_evals_plain},
              {"descriptor_reduction", b.DescriptorReduction(n_orient)},
              {"ring", mode_json(b.ring)},
              {"rift2", mode_json(b.rift2)}};
  if (with_timing) {
    out["time_ring"] = b.ring.Seconds();
    out["time_rift2"] = b.rift2.Seconds();
    out["speedup"] = b.Speedup();
    out["detect_seconds"] = b.detect_seconds;
  }
  return out;
}

std::vector<DatasetPair> LoadManifest(const std::filesystem::path& path) {
  const json j = ReadJsonFile(path);
  if (!j.is_array() || j.empty()) {
    throw FormatError("manifest must be a non-empty JSON array");
  }
  const std::filesystem::path base = path.parent_path();
  std::vector<DatasetPair> pairs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "manifest entry " + std::to_string(i);
    if (!e.is_object()) throw FormatError(where + " is not an object");
    for (const char* key : {"ref", "tgt"}) {
      if (!e.contains(key) || !e.at(key).is_string()) {
        throw FormatError(where + ": '" + key + "' must be a path string");
      }
    }
    if (!e.contains("gt")) throw FormatError(where + ": missing 'gt'");
    for (const auto& [key, value] : e.items()) {
      if (key != "ref" && key != "tgt" && key != "gt" && key != "direction" &&
          key != "name") {
        throw FormatError(where + ": unknown key '" + key + "'");
      }
    }
    DatasetPair pair;
    try {
      pair.gt = RigidTransformFromJson(e.at("gt"));
    } catch (const FormatError& err) {
      throw FormatError(where + ": " + err.what());
    }
    const std::string direction = e.value("direction", std::string("ref_to_tgt"));
    if (direction == "tgt_to_ref") {
      pair.gt = pair.gt.Inverse();
    } else if (direction != "ref_to_tgt") {
      throw FormatError(where + ": direction must be ref_to_tgt or tgt_to_ref");
    }
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    pair.ref_path = resolve(e.at("ref").get<std::string>());
    pair.tgt_path = resolve(e.at("tgt").get<std::string>());
    pair.name = e.contains("name") && e.at("name").is_string()
                    ? e.at("name").get<std::string>()
                    : "pair" + std::to_string(i);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void WriteDescriptors(const std::filesystem::path& path,
                      const DescriptorFile& file) {
  RIFT2_CHECK_PARAM(file.n_orient >= 1 && file.n_orient <= 255 &&
                        file.grid >= 1 && file.grid <= 255,
                    "n_orient and grid must fit in a byte");
  const std::size_t dim =
      static_cast<std::size_t>(file.grid) * file.grid * file.n_orient;
  std::string out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<char>(kDescriptorFileVersion));
  out.push_back(static_cast<char>(file.n_orient));
  out.push_back(static_cast<char>(file.grid));
  PutU32(&out, static_cast<std::uint32_t>(file.descriptors.size()));
  for (const Descriptor& d : file.descriptors) {
    RIFT2_CHECK_PARAM(d.vector.size() == dim, "descriptor length mismatch");
    PutU32(&out, d.keypoint_id);
    out.push_back(static_cast<char>(d.variant));
    out.push_back(static_cast<char>(d.mode));
    for (const float v : d.vector) PutU32(&out, std::bit_cast<std::uint32_t>(v));
  }
  WriteTextFile(path, out);
}

DescriptorFile ReadDescriptors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 3 + 4;
  if (data.size() < kHeader || std::memcmp(data.data(), kMagic.data(), 4) != 0) {
    throw FormatError("not a RIF2 descriptor file: " + path.string());
  }
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  if (p[4] != kDescriptorFileVersion) {
    throw FormatError("unsupported descriptor file version");
  }
  DescriptorFile file;
  file.n_orient = p[5];
  file.grid = p[6];
  const std::uint32_t count = GetU32(p + 7);
  const std::size_t dim =
      static_cast<std::size_t>(file.grid) * file.grid * file.n_orient;
  const std::size_t record = 4 + 1 + 1 + 4 * dim;
  if (data.size() != kHeader + record * count) {
    throw FormatError("descriptor file size does not match its header");
  }
  file.descriptors.resize(count);
  const unsigned char* q = p + kHeader;
  for (Descriptor& d : file.descriptors) {
    d.keypoint_id = GetU32(q);
    d.variant = q[4];
    if (q[5] > 2) throw FormatError("unknown descriptor mode");
    d.mode = static_cast<DescriptorMode>(q[5]);
    q += 6;
    d.vector.resize(dim);
    for (float& v : d.vector) {
      v = std::bit_cast<float>(GetU32(q));
      q += 4;
    }
  }
  return file;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rift2
