// rift2 command-line front end: match, eval, bench, synth, config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rift2/config.h"
#include "rift2/error.h"
#include "rift2/evalbench.h"
#include "rift2/image.h"
#include "rift2/io.h"
#include "rift2/matcher.h"
#include "rift2/pipeline.h"
#include "rift2/synthetic.h"
#include "rift2/viz.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised while interpreting arguments, config files, ground truth or
// manifests. Maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string mode;
  bool no_timing = false;
};

void AddCommon(CLI::App* cmd, CommonOptions* opts, bool with_mode) {
  cmd->add_option("--config", opts->config_path, "flat key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts->overrides, "override one config key (key=value)")
      ->take_all();
  if (with_mode) {
    cmd->add_option("--mode", opts->mode, "rift2 or ring (default from config)")
        ->check(CLI::IsMember({"rift2", "ring"}));
  }
  cmd->add_flag("--no-timing", opts->no_timing,
                "omit wall-clock fields so outputs are reproducible");
}

rift2::Config BuildConfig(const CommonOptions& opts) {
  try {
    rift2::Config cfg;
    if (!opts.config_path.empty()) cfg = rift2::LoadConfigFile(opts.config_path);
    for (const std::string& kv : opts.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw rift2::ParameterError("--set expects key=value, got '" + kv + "'");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      cfg.Set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (!opts.mode.empty()) cfg.mode = rift2::MatchModeFromString(opts.mode);
    cfg.Validate();
    return cfg;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

rift2::RigidTransform LoadTransform(const std::string& path) {
  try {
    return rift2::RigidTransformFromJson(rift2::ReadJsonFile(path));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad ground truth: ") + e.what());
  }
}

void WriteJson(const fs::path& path, const json& j) {
  rift2::WriteTextFile(path, j.dump(2) + "\n");
}

json TimingJson(const rift2::StageTimings& t) {
  return {{"detect", t.detect}, {"describe", t.describe}, {"match", t.match}};
}

// ---------------------------------------------------------------- match

struct MatchArgs {
  CommonOptions common;
  std::string ref, tgt, out, viz, gt, features_dir;
};

int RunMatch(const MatchArgs& a) {
  const rift2::Config cfg = BuildConfig(a.common);
  std::optional<rift2::RigidTransform> gt;
  if (!a.gt.empty()) gt = LoadTransform(a.gt);

  const rift2::Image ref = rift2::LoadImage(a.ref);
  const rift2::Image tgt = rift2::LoadImage(a.tgt);

  rift2::StageTimings timings;
  const rift2::ImageFeatures fr = rift2::ExtractFeatures(ref, cfg);
  const rift2::ImageFeatures ft = rift2::ExtractFeatures(tgt, cfg);
  timings.detect = fr.detect_seconds + ft.detect_seconds;

  double t0 = rift2::NowSeconds();
  const rift2::DescribedPair described =
      rift2::DescribePair(fr, ft, cfg.mode, cfg.descriptor);
  timings.describe = rift2::NowSeconds() - t0;

  t0 = rift2::NowSeconds();
  rift2::MatchSet matches;
  if (!described.ref.empty() && !described.tgt.empty()) {
    matches = rift2::MatchNearest(described.ref, described.tgt);
  }
  matches.mode = cfg.mode == rift2::MatchMode::kRift2 ? rift2::DescriptorMode::kRift2
                                                      : rift2::DescriptorMode::kRing;
  timings.match = rift2::NowSeconds() - t0;

  std::optional<rift2::EvalReport> report;
  if (gt) {
    report = rift2::Evaluate(matches, fr.keypoints, ft.keypoints, *gt, cfg.eval);
    report->timings = timings;
    report->ref_descriptors = described.ref.size();
    report->tgt_descriptors = described.tgt.size();
  }

  const fs::path out(a.out);
  if (out.extension() == ".csv") {
    rift2::WriteTextFile(out, rift2::ToCsv(matches));
  } else {
    json j = {{"mode", std::string(rift2::ToString(cfg.mode))},
              {"ref_keypoints", fr.keypoints.size()},
              {"tgt_keypoints", ft.keypoints.size()},
              {"ref_descriptors", described.ref.size()},
              {"tgt_descriptors", described.tgt.size()},
              {"distance_evals", matches.distance_evals},
              {"matches", rift2::ToJson(matches)}};
    if (report) j["eval"] = rift2::ToJson(*report, !a.common.no_timing);
    if (!a.common.no_timing) j["timings"] = TimingJson(timings);
    WriteJson(out, j);
  }

  if (!a.features_dir.empty()) {
    const fs::path dir(a.features_dir);
    fs::create_directories(dir);
    WriteJson(dir / "ref_keypoints.json", rift2::ToJson(fr.keypoints));
    WriteJson(dir / "tgt_keypoints.json", rift2::ToJson(ft.keypoints));
    rift2::DescriptorFile file;
    file.n_orient = cfg.bank.n_orient;
    file.grid = cfg.descriptor.grid;
    file.descriptors = described.ref;
    rift2::WriteDescriptors(dir / "ref.rif2", file);
    file.descriptors = described.tgt;
    rift2::WriteDescriptors(dir / "tgt.rif2", file);
  }

  if (!a.viz.empty()) {
    std::optional<std::vector<std::size_t>> drawn;
    if (gt) {
      drawn = rift2::CorrectMatchIndices(matches, fr.keypoints, ft.keypoints, *gt,
                                         cfg.eval.residual_threshold);
    }
    rift2::SaveMatchVisualization(ref, tgt, fr.keypoints, ft.keypoints, matches,
                                  drawn, a.viz);
  }

  std::cerr << "matches: " << matches.pairs.size();
  if (report) {
    std::cerr << "  n=" << report->n_correct
              << "  rmse=" << rift2::FormatRmse(report->rmse)
              << "  success=" << (report->success ? "yes" : "no");
  }
  std::cerr << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  CommonOptions common;
  std::string manifest, report;
};

int RunEval(const EvalArgs& a) {
  const rift2::Config cfg = BuildConfig(a.common);
  std::vector<rift2::DatasetPair> pairs;
  try {
    pairs = rift2::LoadManifest(a.manifest);
  } catch (const rift2::FormatError& e) {
    throw UsageError(e.what());
  } catch (const rift2::IoError& e) {
    throw UsageError(e.what());
  }
  if (pairs.empty()) throw UsageError("manifest lists no pairs");

  const rift2::DatasetSummary summary = rift2::DatasetEval(pairs, cfg.mode, cfg);
  const fs::path report(a.report);
  WriteJson(report, rift2::ToJson(summary, !a.common.no_timing));
  fs::path csv = report;
  csv.replace_extension(".csv");
  rift2::WriteTextFile(csv, rift2::ToCsv(summary, !a.common.no_timing));

  std::cerr << "pairs: " << summary.pairs << "  success rate: "
            << summary.success_rate << "%  mean n: " << summary.mean_n << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  CommonOptions common;
  std::string ref, tgt, report, gt;
};

int RunBench(const BenchArgs& a) {
  const rift2::Config cfg = BuildConfig(a.common);
  std::optional<rift2::RigidTransform> gt;
  if (!a.gt.empty()) gt = LoadTransform(a.gt);
  const rift2::Image ref = rift2::LoadImage(a.ref);
  const rift2::Image tgt = rift2::LoadImage(a.tgt);
  const rift2::BenchReport bench = rift2::Benchmark(ref, tgt, cfg, gt);
  WriteJson(a.report, rift2::ToJson(bench, cfg, !a.common.no_timing));
  std::fprintf(stderr, "descs ring %zu  rift2 %zu  reduction %.2f  speedup %.2f\n",
               bench.ring.ref_descriptors, bench.rift2.ref_descriptors,
               bench.DescriptorReduction(cfg.bank.n_orient), bench.Speedup());
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir;
  int size = 512;
  std::uint64_t seed = 7;
  int rotations = 5;
  double step_degrees = 30.0;
  bool multimodal = false;
};

// A reference scene plus rotated copies about the image center and a
// manifest pointing at them.
int RunSynth(const SynthArgs& a) {
  if (a.size < 128) throw UsageError("--size must be at least 128");
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  rift2::Image ref, tgt_base;
  if (a.multimodal) {
    rift2::synthetic::ModalityPair p =
        rift2::synthetic::MultimodalScene(a.size, a.size, a.seed);
    ref = std::move(p.optical);
    tgt_base = std::move(p.radar);
  } else {
    ref = rift2::synthetic::Scene(a.size, a.size, a.seed);
    tgt_base = ref;
  }
  rift2::SaveImage(ref, dir / "ref.png");

  const Eigen::Vector2d center((a.size - 1) / 2.0, (a.size - 1) / 2.0);
  json manifest = json::array();
  for (int k = a.multimodal ? 0 : 1; k <= a.rotations; ++k) {
    const double angle = k * a.step_degrees * std::numbers::pi / 180.0;
    const rift2::RigidTransform gt = rift2::RigidTransform::RotationAbout(angle, center);
    const std::string name = "tgt_" + std::to_string(k) + ".png";
    rift2::SaveImage(rift2::WarpRigid(tgt_base, gt, a.size, a.size), dir / name);
    manifest.push_back({{"name", "rot" + std::to_string(k)},
                        {"ref", "ref.png"},
                        {"tgt", name},
                        {"gt", rift2::ToJson(gt)},
                        {"direction", "ref_to_tgt"}});
  }
  WriteJson(dir / "manifest.json", manifest);
  std::cerr << "wrote " << manifest.size() << " pairs to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIFT2 multimodal image matching"};
  app.require_subcommand(1);

  MatchArgs match_args;
  CLI::App* match = app.add_subcommand("match", "match one image pair");
  AddCommon(match, &match_args.common, true);
  match->add_option("--ref", match_args.ref, "reference image")
      ->required()->check(CLI::ExistingFile);
  match->add_option("--tgt", match_args.tgt, "target image")
      ->required()->check(CLI::ExistingFile);
  match->add_option("--out", match_args.out, "match output (.json or .csv)")->required();
  match->add_option("--viz", match_args.viz, "side-by-side match image (.png)");
  match->add_option("--gt", match_args.gt, "ground-truth transform JSON (ref -> tgt)")
      ->check(CLI::ExistingFile);
  match->add_option("--save-features", match_args.features_dir,
                    "directory for keypoint JSON and .rif2 descriptor files");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a manifest of pairs");
  AddCommon(eval, &eval_args.common, true);
  eval->add_option("--manifest", eval_args.manifest, "dataset manifest JSON")
      ->required()->check(CLI::ExistingFile);
  eval->add_option("--report", eval_args.report,
                   "report JSON; a CSV is written next to it")->required();

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "ring vs rift2 cost on one pair");
  AddCommon(bench, &bench_args.common, false);
  bench->add_option("--ref", bench_args.ref, "reference image")
      ->required()->check(CLI::ExistingFile);
  bench->add_option("--tgt", bench_args.tgt, "target image")
      ->required()->check(CLI::ExistingFile);
  bench->add_option("--report", bench_args.report, "benchmark JSON")->required();
  bench->add_option("--gt", bench_args.gt, "ground-truth transform JSON (ref -> tgt)")
      ->check(CLI::ExistingFile);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic rotation suite");
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth->add_option("--size", synth_args.size, "image side in pixels");
  synth->add_option("--seed", synth_args.seed, "scene seed");
  synth->add_option("--rotations", synth_args.rotations, "number of rotated copies")
      ->check(CLI::Range(1, 1000));
  synth->add_option("--step", synth_args.step_degrees, "rotation step in degrees");
  synth->add_flag("--multimodal", synth_args.multimodal,
                  "render targets with a second intensity table and speckle");

  CommonOptions config_args;
  CLI::App* config = app.add_subcommand("config", "print the effective configuration");
  AddCommon(config, &config_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*match) return RunMatch(match_args);
    if (*eval) return RunEval(eval_args);
    if (*bench) return RunBench(bench_args);
    if (*synth) return RunSynth(synth_args);
    if (*config) {
      std::cout << BuildConfig(config_args).ToText();
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
