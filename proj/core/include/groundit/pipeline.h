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

#ifndef GROUNDIT_PIPELINE_H_
#define GROUNDIT_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "groundit/detections_io.h"
#include "groundit/dtl_encoder.h"
#include "groundit/grounding_gate.h"
#include "groundit/metrics.h"
#include "groundit/run_config.h"
#include "groundit/span_decoder.h"

namespace groundit {

// A pipeline stage failed; `stage` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Grounding from a detection stream: noun extraction, best proposals, gate.
struct GroundingOutcome {
  NounSet nouns;
  ScoreTable table;
  GateConfig gate_config;
  GateResult result;
};

// Nouns come from `query` when it is non-empty, else from every lexicon term.
// True when `phrase` is a lexicon noun, optionally preceded by modifiers.
bool KnownNoun(const std::string& phrase, const Lexicon& nouns, const Lexicon& modifiers);

// Detections naming nouns outside the lexicon, or frames beyond `frames`,
// throw SchemaError. Detections for lexicon nouns absent from the query are
// ignored. An empty query grounds every lexicon noun.
GroundingOutcome GroundDetections(const std::vector<DetectionRecord>& detections,
                                  const Lexicon& nouns, const Lexicon& modifiers,
                                  const std::string& query, int frames,
                                  const RunConfig& config);

// Propagator backed by the detection stream: frame t reuses the mask of the
// noun's best proposal at t when it clears the noun threshold, and an empty
// mask otherwise.
class DetectionLookupPropagator final : public MaskPropagator {
 public:
  DetectionLookupPropagator(const std::vector<DetectionRecord>& detections,
                            const ScoreTable& table, std::vector<double> thresholds);
  std::optional<BinaryMask> Propagate(const BinaryMask& previous, int noun_index,
                                      int frame) override;

 private:
  const std::vector<DetectionRecord>& detections_;
  const ScoreTable& table_;
  std::vector<double> thresholds_;
};

// Seed masks from each noun's best proposal at `start`; nouns without a mask
// there get an empty width x height seed.
std::vector<BinaryMask> SeedMasks(const std::vector<DetectionRecord>& detections,
                                  const ScoreTable& table, int start, int width, int height);

// Union masks M_t for the whole clip, or empty when no start frame exists or
// the detections carry no masks.
std::vector<BinaryMask> ConditionMasks(const std::vector<DetectionRecord>& detections,
                                       const GroundingOutcome& grounding,
                                       MaskPropagator& propagator);

// Frame embeddings z from latents (T x positions*channels): forward noise at
// tau0, seeded stub denoiser, spatial pooling and a seeded projection to
// `embed_dim`.
DenseMatrix EncodeLatents(const DenseMatrix& latents, int positions,
                          const std::vector<BinaryMask>& masks, const RunConfig& config,
                          int embed_dim, std::uint64_t seed);

struct DemoOptions {
  RunConfig config;
  std::optional<std::string> out_dir;  // write the artifact bundle here
  double duration_s = 30.0;
  // Draw in-span and out-of-span latents from one cluster (no signal to learn).
  bool uniform_features = false;
};

struct DemoResult {
  FrameSpan planted;
  GateResult gate;
  SpanPrediction prediction;
  double iou = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<std::string> files;  // bundle files, relative to out_dir
};

// Synthetic end-to-end run on a seeded clip with a planted span:
// generate -> ground -> encode -> fuse -> train heads on held-out clips ->
// backbone -> decode -> eval. Throws StageError.
DemoResult RunDemo(const DemoOptions& options);

}  // namespace groundit

#endif  // GROUNDIT_PIPELINE_H_
