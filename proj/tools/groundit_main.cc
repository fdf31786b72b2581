// Copyright 2026 The Groundit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// groundit: command-line driver for the grounding pipeline.
//
//   groundit ground    --detections D.jsonl --lexicon L.txt [--query Q] [--out DIR]
//   groundit eval      --pred P.jsonl --gt G.jsonl [--thresholds 0.3,0.5,0.7]
//   groundit demo      [--seed N] [--out DIR]
//   groundit gradcheck [--seed N]
//   groundit encode    --latents X.bin --out DIR [--detections D.jsonl --lexicon L.txt]
//
// Exit codes: 0 success, 2 input schema error, 3 id mismatch, 4 stage failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "groundit/detections_io.h"
#include "groundit/errors.h"
#include "groundit/latent_io.h"
#include "groundit/metrics.h"
#include "groundit/pipeline.h"
#include "groundit/run_config.h"
#include "groundit/span_decoder.h"
#include "groundit/trainer.h"

namespace {

using namespace groundit;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitStage = 4;

// Raised for malformed user input that is not tied to a file line.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string thresholds;
  std::string out_dir;
};

RunConfig LoadConfig(const CommonFlags& flags) {
  RunConfig config;
  try {
    if (!flags.config_path.empty()) config = LoadRunConfig(flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (!flags.thresholds.empty()) config.thresholds = ParseThresholds(flags.thresholds);
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return config;
}

Lexicon LoadLexicon(const std::string& path) {
  if (path.empty()) return {};
  try {
    return Lexicon::Load(path);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError("write", "cannot write " + path.string());
  out << text;
}

struct GroundFlags {
  std::string detections;
  std::string lexicon;
  std::string modifiers;
  std::string query;
};

int RunGround(const CommonFlags& common, const GroundFlags& flags) {
  const RunConfig config = LoadConfig(common);
  const Lexicon nouns = LoadLexicon(flags.lexicon);
  const Lexicon modifiers = LoadLexicon(flags.modifiers);
  const auto detections = ReadDetectionsFile(flags.detections);
  const GroundingOutcome grounding =
      GroundDetections(detections, nouns, modifiers, flags.query, config.frames, config);
  const std::string json = GateResultJson(grounding.result);
  std::cout << json << '\n';
  if (!common.out_dir.empty()) {
    std::filesystem::create_directories(common.out_dir);
    WriteText(std::filesystem::path(common.out_dir) / "gate.json", json + "\n");
    DetectionLookupPropagator propagator(detections, grounding.table,
                                         grounding.gate_config.thresholds);
    const auto masks = ConditionMasks(detections, grounding, propagator);
    std::ostringstream out;
    WriteMasksJsonl(out, masks);
    WriteText(std::filesystem::path(common.out_dir) / "masks.jsonl", out.str());
  }
  return kExitOk;
}

std::vector<double> ParseIouThresholds(const std::string& csv) {
  if (csv.empty()) return kDefaultIouThresholds;
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0 && v <= 1.0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw InputError("bad IoU threshold '" + item + "'");
    }
  }
  if (out.empty()) throw InputError("empty IoU threshold list");
  return out;
}

struct EvalFlags {
  std::string pred;
  std::string gt;
};

int RunEval(const CommonFlags& common, const EvalFlags& flags) {
  const auto thresholds = ParseIouThresholds(common.thresholds);
  auto pred_in = OpenInput(flags.pred);
  auto gt_in = OpenInput(flags.gt);
  const auto preds = ReadPredictionJsonl(pred_in);
  const auto gts = ReadGroundTruthJsonl(gt_in);
  std::vector<std::pair<std::string, Interval>> pairs;
  for (const auto& p : preds) pairs.push_back({p.id, {p.seconds.start_s, p.seconds.end_s}});
  const JoinResult joined = JoinById(pairs, gts);
  if (!joined.unmatched_ids.empty()) {
    std::cerr << "unmatched ids:";
    for (const auto& id : joined.unmatched_ids) std::cerr << ' ' << id;
    std::cerr << '\n';
    return kExitMismatch;
  }
  MetricReport report;
  try {
    report = Aggregate(joined.records, thresholds);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const std::string json = ReportJson(report);
  std::cout << json << '\n' << ReportTable(report);
  if (!common.out_dir.empty()) {
    std::filesystem::create_directories(common.out_dir);
    WriteText(std::filesystem::path(common.out_dir) / "report.json", json + "\n");
  }
  return kExitOk;
}

int RunDemoCommand(const CommonFlags& common, bool uniform) {
  DemoOptions options;
  options.config = LoadConfig(common);
  options.uniform_features = uniform;
  if (!common.out_dir.empty()) options.out_dir = common.out_dir;
  const auto begin = std::chrono::steady_clock::now();
  const DemoResult result = RunDemo(options);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  std::printf("planted span: [%d, %d]\n", result.planted.first, result.planted.last);
  std::printf("predicted span: [%d, %d] joint=%.6f\n", result.prediction.start,
              result.prediction.end, result.prediction.joint);
  std::printf("loss: %.6f -> %.6f\n", result.initial_loss, result.final_loss);
  std::printf("elapsed: %.2fs\n", elapsed);
  std::printf("IoU: %.4f\n", result.iou);
  return kExitOk;
}

int RunGradcheck(const CommonFlags& common, int instances, bool corrupt) {
  GradientCheckOptions options;
  if (common.seed) options.seed = *common.seed;
  options.instances = instances;
  options.corrupt_analytic = corrupt;
  bool ok = true;
  std::printf("%-16s %9s %14s  %s\n", "check", "instances", "max_rel_err", "result");
  for (const auto& r : RunGradientChecks(options)) {
    std::printf("%-16s %9d %14.6e  %s\n", r.name.c_str(), r.instances, r.max_relative_error,
                r.passed ? "PASS" : "FAIL");
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitStage;
}

struct EncodeFlags {
  std::string latents;
  int positions = 1;
  int embed_dim = 8;
  GroundFlags ground;
};

int RunEncode(const CommonFlags& common, const EncodeFlags& flags) {
  const RunConfig config = LoadConfig(common);
  if (common.out_dir.empty()) throw InputError("encode requires --out");
  const DenseMatrix latents = ReadMatrixFile(flags.latents);
  if (flags.positions < 1 || latents.cols() % flags.positions != 0) {
    throw InputError("latent width is not divisible by --positions");
  }
  std::vector<BinaryMask> masks;
  if (!flags.ground.detections.empty()) {
    const Lexicon nouns = LoadLexicon(flags.ground.lexicon);
    const Lexicon modifiers = LoadLexicon(flags.ground.modifiers);
    const auto detections = ReadDetectionsFile(flags.ground.detections);
    const auto grounding = GroundDetections(detections, nouns, modifiers, flags.ground.query,
                                            static_cast<int>(latents.rows()), config);
    DetectionLookupPropagator propagator(detections, grounding.table,
                                         grounding.gate_config.thresholds);
    masks = ConditionMasks(detections, grounding, propagator);
  }
  DenseMatrix embeddings;
  try {
    embeddings = EncodeLatents(latents, flags.positions, masks, config, flags.embed_dim,
                               config.seed);
  } catch (const std::exception& e) {
    throw StageError("encode", e.what());
  }
  std::filesystem::create_directories(common.out_dir);
  WriteMatrixFile((std::filesystem::path(common.out_dir) / "embeddings.bin").string(),
                  embeddings);
  std::printf("embeddings: %zu x %zu\n", embeddings.rows(), embeddings.cols());
  return kExitOk;
}

void AddCommon(CLI::App* cmd, CommonFlags& flags, bool thresholds) {
  cmd->add_option("--config", flags.config_path, "flat key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "RNG seed (overrides the config)");
  if (thresholds) {
    cmd->add_option("--thresholds", flags.thresholds,
                    "detection thresholds, e.g. 0.5,dog:0.6");
  }
  cmd->add_option("--out", flags.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-gated temporal video grounding toolkit"};
  app.require_subcommand(1);

  CommonFlags common;
  GroundFlags ground;
  auto* ground_cmd = app.add_subcommand("ground", "gate a detection stream");
  AddCommon(ground_cmd, common, true);
  ground_cmd->add_option("--detections", ground.detections, "detections JSONL")->required();
  ground_cmd->add_option("--lexicon", ground.lexicon, "noun lexicon")->required();
  ground_cmd->add_option("--modifiers", ground.modifiers, "modifier lexicon");
  ground_cmd->add_option("--query", ground.query, "natural-language query");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "predictions JSONL")->required();
  eval_cmd->add_option("--gt", eval.gt, "ground truth JSONL")->required();
  eval_cmd->add_option("--thresholds", common.thresholds, "IoU thresholds, e.g. 0.3,0.5,0.7");
  eval_cmd->add_option("--out", common.out_dir, "output directory");

  auto* demo_cmd = app.add_subcommand("demo", "run the synthetic end-to-end pipeline");
  AddCommon(demo_cmd, common, true);
  bool uniform = false;
  demo_cmd->add_flag("--uniform-features", uniform)->group("");

  int instances = 100;
  bool corrupt = false;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  grad_cmd->add_option("--seed", common.seed, "RNG seed");
  grad_cmd->add_option("--instances", instances, "instances per check")
      ->check(CLI::PositiveNumber);
  grad_cmd->add_flag("--corrupt-gradient", corrupt)->group("");

  EncodeFlags encode;
  auto* encode_cmd = app.add_subcommand("encode", "extract frame embeddings from latents");
  AddCommon(encode_cmd, common, true);
  encode_cmd->add_option("--latents", encode.latents, "latent matrix file")->required();
  encode_cmd->add_option("--positions", encode.positions, "spatial positions per frame");
  encode_cmd->add_option("--embed-dim", encode.embed_dim, "embedding width");
  encode_cmd->add_option("--detections", encode.ground.detections, "detections JSONL");
  encode_cmd->add_option("--lexicon", encode.ground.lexicon, "noun lexicon");
  encode_cmd->add_option("--modifiers", encode.ground.modifiers, "modifier lexicon");
  encode_cmd->add_option("--query", encode.ground.query, "natural-language query");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (*ground_cmd) return RunGround(common, ground);
    if (*eval_cmd) return RunEval(common, eval);
    if (*demo_cmd) return RunDemoCommand(common, uniform);
    if (*grad_cmd) return RunGradcheck(common, instances, corrupt);
    if (*encode_cmd) return RunEncode(common, encode);
  } catch (const SchemaError& e) {
    std::cerr << "schema error";
    if (e.line() > 0) std::cerr << " at line " << e.line();
    std::cerr << ": " << e.what() << '\n';
    return kExitSchema;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const StageError& e) {
    std::cerr << "stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitStage;
}
