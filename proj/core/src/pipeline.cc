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

#include "groundit/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "groundit/alignment_loss.h"
#include "groundit/errors.h"
#include "groundit/grounding_model.h"
#include "groundit/latent_io.h"
#include "groundit/random.h"
#include "groundit/trainer.h"

namespace groundit {

bool KnownNoun(const std::string& phrase, const Lexicon& nouns, const Lexicon& modifiers) {
  const auto words = TokenizeQuery(phrase);
  if (words.empty() || !nouns.Contains(words.back())) return false;
  return std::all_of(words.begin(), words.end() - 1,
                     [&](const std::string& w) { return modifiers.Contains(w); });
}

GroundingOutcome GroundDetections(const std::vector<DetectionRecord>& detections,
                                  const Lexicon& nouns, const Lexicon& modifiers,
                                  const std::string& query, int frames,
                                  const RunConfig& config) {
  NounSet noun_set = query.empty() ? NounSet{nouns.terms()}
                                   : ExtractNouns(query, nouns, modifiers);
  std::vector<DetectionRecord> relevant;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (!KnownNoun(d.noun, nouns, modifiers)) {
      throw SchemaError("detection " + std::to_string(i + 1) + " references unknown noun '" +
                            d.noun + "'",
                        0);
    }
    if (d.frame > frames) {
      throw SchemaError("detection " + std::to_string(i + 1) + " has frame " +
                            std::to_string(d.frame) + " beyond T=" + std::to_string(frames),
                        0);
    }
    if (std::find(noun_set.nouns.begin(), noun_set.nouns.end(), d.noun) != noun_set.nouns.end()) {
      relevant.push_back(d);
    }
  }
  ScoreTable table = SelectBestProposals(relevant, noun_set, frames);
  GateConfig gate{config.thresholds.For(noun_set), config.persistence, config.min_span};
  GateResult result = RunGate(table, gate);
  return {std::move(noun_set), std::move(table), std::move(gate), std::move(result)};
}

DetectionLookupPropagator::DetectionLookupPropagator(
    const std::vector<DetectionRecord>& detections, const ScoreTable& table,
    std::vector<double> thresholds)
    : detections_(detections), table_(table), thresholds_(std::move(thresholds)) {}

std::optional<BinaryMask> DetectionLookupPropagator::Propagate(const BinaryMask& previous,
                                                               int noun_index, int frame) {
  const auto& noun = table_.nouns()[noun_index];
  if (table_.best_score(noun_index, frame) < thresholds_[noun_index]) {
    return BinaryMask::Empty(previous.width, previous.height);
  }
  const int proposal = table_.best_proposal(noun_index, frame);
  for (const auto& d : detections_) {
    if (d.frame == frame && d.noun == noun && d.proposal == proposal && d.mask) return *d.mask;
  }
  return BinaryMask::Empty(previous.width, previous.height);
}

std::vector<BinaryMask> SeedMasks(const std::vector<DetectionRecord>& detections,
                                  const ScoreTable& table, int start, int width, int height) {
  std::vector<BinaryMask> seeds;
  for (int i = 0; i < table.num_nouns(); ++i) {
    const int proposal = table.best_proposal(i, start);
    BinaryMask seed = BinaryMask::Empty(width, height);
    for (const auto& d : detections) {
      if (d.frame == start && d.noun == table.nouns()[i] && d.proposal == proposal && d.mask) {
        seed = *d.mask;
        break;
      }
    }
    seeds.push_back(std::move(seed));
  }
  return seeds;
}

std::vector<BinaryMask> ConditionMasks(const std::vector<DetectionRecord>& detections,
                                       const GroundingOutcome& grounding,
                                       MaskPropagator& propagator) {
  if (!grounding.result.start || grounding.table.num_nouns() == 0) return {};
  const auto with_mask = std::find_if(detections.begin(), detections.end(),
                                      [](const DetectionRecord& d) { return d.mask.has_value(); });
  if (with_mask == detections.end()) return {};
  const int w = with_mask->mask->width;
  const int h = with_mask->mask->height;
  const auto seeds = SeedMasks(detections, grounding.table, *grounding.result.start, w, h);
  const auto tracks = SeedAndPropagate(grounding.table, *grounding.result.start, seeds, propagator);
  return UnionMasksPerFrame(tracks, grounding.table.num_frames(), w, h);
}

DenseMatrix EncodeLatents(const DenseMatrix& latents, int positions,
                          const std::vector<BinaryMask>& masks, const RunConfig& config,
                          int embed_dim, std::uint64_t seed) {
  const LatentVideo x0 = LatentVideo::FromMatrix(latents, positions);
  DTLConfig dtl = config.Dtl();
  dtl.frames = x0.frames();
  dtl.embed_dim = embed_dim;
  Rng rng(seed);
  const StubDenoiser denoiser(x0.channels(), dtl.steps, rng());
  const auto features = ExtractFeatures(x0, {masks, "highlight the masked region"}, dtl,
                                        denoiser, rng());
  Projection g_phi{GaussianMatrix(embed_dim, features.channels(),
                                  1.0 / std::sqrt(static_cast<double>(features.channels())), rng),
                   std::vector<double>(embed_dim, 0.0)};
  return PoolProject(features, g_phi);
}

namespace {

constexpr int kPositions = 4;
constexpr int kChannels = 8;
constexpr int kMaskSide = 16;
constexpr int kTrainingClips = 16;
constexpr double kClusterNoise = 0.3;
const char* const kQuery = "When does the dog first touch the frisbee?";

struct ClusterCentres {
  std::vector<double> inside;
  std::vector<double> outside;
};

struct SyntheticClip {
  FrameSpan planted;
  DenseMatrix latents;  // T x (positions * channels)
  std::vector<DetectionRecord> detections;
};

BinaryMask RandomBox(Rng& rng) {
  std::uniform_int_distribution<int> corner(0, kMaskSide / 2);
  std::uniform_int_distribution<int> extent(3, kMaskSide / 2);
  MaskGrid grid(kMaskSide, kMaskSide);
  const int x0 = corner(rng);
  const int y0 = corner(rng);
  const int w = extent(rng);
  const int h = extent(rng);
  for (int y = y0; y < std::min(kMaskSide, y0 + h); ++y) {
    for (int x = x0; x < std::min(kMaskSide, x0 + w); ++x) grid.at(x, y) = 1;
  }
  return RleEncode(grid);
}

SyntheticClip MakeClip(std::uint64_t seed, int frames, const ClusterCentres& centres) {
  Rng rng(seed);
  SyntheticClip clip;
  std::uniform_int_distribution<int> length_dist(std::max(1, frames / 4), std::max(1, frames / 2));
  const int length = length_dist(rng);
  std::uniform_int_distribution<int> start_dist(1, frames - length + 1);
  clip.planted.first = start_dist(rng);
  clip.planted.last = clip.planted.first + length - 1;

  const int width = kPositions * kChannels;
  clip.latents = DenseMatrix(frames, width);
  std::normal_distribution<double> noise(0.0, kClusterNoise);
  for (int t = 1; t <= frames; ++t) {
    const bool inside = t >= clip.planted.first && t <= clip.planted.last;
    const auto& centre = inside ? centres.inside : centres.outside;
    auto row = clip.latents.row(t - 1);
    for (int i = 0; i < width; ++i) row[i] = centre[i] + noise(rng);
  }

  // The dog shows up a few frames before the frisbee, so only the AND of both
  // nouns marks the planted span.
  std::uniform_real_distribution<double> high(0.75, 0.95);
  std::uniform_real_distribution<double> low(0.05, 0.45);
  const int dog_from = std::max(1, clip.planted.first - 6);
  for (int t = 1; t <= frames; ++t) {
    for (const char* noun : {"dog", "frisbee"}) {
      const bool dog = noun[0] == 'd';
      const bool present = t <= clip.planted.last && t >= (dog ? dog_from : clip.planted.first);
      DetectionRecord best{t, noun, 0, present ? high(rng) : low(rng), std::nullopt};
      if (present) best.mask = RandomBox(rng);
      clip.detections.push_back(std::move(best));
      clip.detections.push_back({t, noun, 1, low(rng), std::nullopt});
    }
  }
  return clip;
}

struct PreparedClip {
  SyntheticClip clip;
  std::optional<GroundingOutcome> grounding;
  std::vector<BinaryMask> masks;
  DenseMatrix pooled;
  TrainingExample example;
};

template <typename Fn>
auto Stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

DemoResult RunDemo(const DemoOptions& options) {
  const RunConfig& config = options.config;
  Stage("config", [&] {
    config.Validate();
    return 0;
  });
  const int frames = config.frames;

  ModelDims dims;
  dims.feature_channels = kChannels;
  dims.lora_rank = std::min(config.lora_rank, dims.llm_dim);
  // Keep the configured alpha / r scale when the rank is clamped to the stub width.
  dims.lora_alpha = config.lora_alpha * dims.lora_rank / config.lora_rank;

  Rng rng(config.seed);
  const std::uint64_t denoiser_seed = rng();
  const std::uint64_t model_seed = rng();
  const std::uint64_t aux_seed = rng();
  const std::uint64_t text_seed = rng();
  ClusterCentres centres;
  centres.inside = GaussianVector(kPositions * kChannels, 1.0, rng);
  centres.outside = GaussianVector(kPositions * kChannels, 1.0, rng);
  if (options.uniform_features) centres.outside = centres.inside;

  const Lexicon nouns{"dog", "frisbee"};
  const HashedBagTextEncoder text_encoder(dims.text_dim, text_seed);
  const HashedBagTextEncoder word_encoder(dims.llm_dim, text_seed ^ 0x77);
  const StubAuxEncoder aux_encoder(kPositions * kChannels, dims.frame_dim, aux_seed);
  DTLConfig dtl = config.Dtl();
  dtl.embed_dim = dims.frame_dim;
  const StubDenoiser denoiser(kChannels, dtl.steps, denoiser_seed);

  const auto prepare = [&](std::uint64_t clip_seed) {
    PreparedClip p;
    p.clip = Stage("generate", [&] { return MakeClip(clip_seed, frames, centres); });
    p.grounding = Stage("ground", [&] {
      return GroundDetections(p.clip.detections, nouns, {}, kQuery, frames, config);
    });
    p.masks = Stage("ground", [&] {
      DetectionLookupPropagator propagator(p.clip.detections, p.grounding->table,
                                           p.grounding->gate_config.thresholds);
      return ConditionMasks(p.clip.detections, *p.grounding, propagator);
    });
    p.pooled = Stage("encode", [&] {
      const LatentVideo x0 = LatentVideo::FromMatrix(p.clip.latents, kPositions);
      const auto h = ExtractFeatures(x0, {p.masks, "highlight the masked region"}, dtl,
                                     denoiser, clip_seed ^ 0xd1ffu);
      return PoolFrames(h);
    });
    p.example.pooled_features = p.pooled;
    p.example.aux_features = Stage("encode", [&] { return EncodeFrames(aux_encoder, p.clip.latents); });
    p.example.text_embedding = text_encoder.Encode(kQuery);
    p.example.text_tokens = word_encoder.EncodeTokens(kQuery);
    p.example.target = p.clip.planted;
    if (p.grounding->result.start) {
      DetectionLookupPropagator propagator(p.clip.detections, p.grounding->table,
                                           p.grounding->gate_config.thresholds);
      const auto seeds = SeedMasks(p.clip.detections, p.grounding->table,
                                   *p.grounding->result.start, kMaskSide, kMaskSide);
      p.example.tracks = SeedAndPropagate(p.grounding->table, *p.grounding->result.start, seeds,
                                          propagator);
    }
    return p;
  };

  const PreparedClip eval_clip = prepare(rng());
  std::vector<TrainingExample> train_set;
  for (int i = 0; i < kTrainingClips; ++i) train_set.push_back(prepare(rng()).example);

  GroundingModel model = Stage("fuse", [&] {
    return GroundingModel::Seeded(dims, {config.n_obj, config.n_time}, config.n_bins, model_seed);
  });

  TrainOptions train;
  train.loss.lambda_kl = config.lambda_kl;
  train.loss.learning_rate = 0.5;
  train.loss.steps = 600;
  train.update_non_head = false;
  const auto trace = Stage("train", [&] { return Train(model, train_set, train); });

  const ForwardResult fwd = Stage("backbone", [&] { return Forward(model, eval_clip.example); });
  DemoResult result;
  result.planted = eval_clip.clip.planted;
  result.gate = eval_clip.grounding->result;
  result.prediction = Stage("decode", [&] { return DecodeSpan(fwd.heads.start, fwd.heads.end); });
  result.initial_loss = trace.front().total;
  result.final_loss = trace.back().total;

  const SpanPrediction planted_span{result.planted.first, result.planted.last, 1.0};
  const auto pred_s = SpanToSeconds(result.prediction, frames, options.duration_s);
  const auto gt_s = SpanToSeconds(planted_span, frames, options.duration_s);
  const MetricReport report = Stage("eval", [&] {
    return Aggregate({{"demo", {pred_s.start_s, pred_s.end_s}, {gt_s.start_s, gt_s.end_s},
                       std::nullopt}});
  });
  result.iou = IntervalIou({pred_s.start_s, pred_s.end_s}, {gt_s.start_s, gt_s.end_s});

  if (options.out_dir) {
    Stage("write", [&] {
      namespace fs = std::filesystem;
      const fs::path dir(*options.out_dir);
      fs::create_directories(dir);
      const auto open = [&](const std::string& name) {
        result.files.push_back(name);
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        return out;
      };
      open("config.txt") << DumpRunConfig(config);
      {
        auto out = open("latents.bin");
        WriteMatrix(out, eval_clip.clip.latents);
      }
      {
        auto out = open("detections.jsonl");
        WriteDetectionsJsonl(out, eval_clip.clip.detections);
      }
      open("gate.json") << GateResultJson(eval_clip.grounding->result) << '\n';
      {
        auto out = open("masks.jsonl");
        WriteMasksJsonl(out, eval_clip.masks);
      }
      {
        auto out = open("embeddings.bin");
        WriteMatrix(out, fwd.frame_embeddings);
      }
      {
        auto out = open("tokens.jsonl");
        WriteTokenDump(out, fwd.sequence);
      }
      {
        auto out = open("loss_trace.csv");
        WriteLossTraceCsv(out, trace);
      }
      {
        auto out = open("predictions.jsonl");
        WritePredictionJsonl(out, {{"demo", result.prediction, pred_s}});
      }
      {
        auto out = open("ground_truth.jsonl");
        out << "{\"id\":\"demo\",\"start_s\":" << gt_s.start_s << ",\"end_s\":" << gt_s.end_s
            << "}\n";
      }
      open("report.json") << ReportJson(report) << '\n';
      return 0;
    });
  }
  return result;
}

}  // namespace groundit
