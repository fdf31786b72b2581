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

#ifndef GROUNDIT_GROUNDING_MODEL_H_
#define GROUNDIT_GROUNDING_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "groundit/alignment_loss.h"
#include "groundit/backbone_adapter.h"
#include "groundit/dtl_encoder.h"
#include "groundit/grounding_gate.h"
#include "groundit/span_decoder.h"
#include "groundit/token_fusion.h"

namespace groundit {

// Composition of the trainable stages that sit after the frozen denoiser:
// g_phi -> fusion -> mixed tokens -> backbone (+ LoRA) -> start/end heads.

struct ModelDims {
  int feature_channels = 8;  // C, width of pooled denoiser features
  int frame_dim = 8;         // d_v
  int text_dim = 8;          // d_t
  int time_dim = 8;          // d_f, even
  int llm_dim = 16;          // d_llm
  int lora_rank = 4;
  double lora_alpha = 8.0;
};

struct Trainables {
  HeadParams heads;
  Projection g_phi;     // d_v x C
  FusionParams fusion;  // d_llm x (d_v + d_t + d_f)
  LoraAdapter final_lora;

  // Every trainable value except the heads, for finite-difference updates.
  std::vector<std::span<double>> NonHeadBlocks();
};

struct FrozenParts {
  BackboneStub backbone;
  AssemblyParams assembly;
  DenseMatrix object_projection;  // d_llm x d_v
};

struct GroundingModel {
  ModelDims dims;
  FrozenParts frozen;
  Trainables trainables;

  // Seeded weights. The LoRA A factor starts at zero so the initial model
  // matches the frozen backbone.
  static GroundingModel Seeded(const ModelDims& dims, const TokenBudgets& budgets, int num_bins,
                               std::uint64_t seed);
};

// Everything the trainable stages need from one clip. The denoiser is frozen,
// so its pooled output is precomputed.
struct TrainingExample {
  DenseMatrix pooled_features;  // T x C
  DenseMatrix aux_features;     // T x d_v
  std::vector<double> text_embedding;              // d_t
  std::vector<std::vector<double>> text_tokens;    // each d_llm
  std::vector<MaskTrack> tracks;
  FrameSpan target;
};

struct ForwardResult {
  DenseMatrix frame_embeddings;  // z, T x d_v
  MixedTokenSequence sequence;
  DenseMatrix video_hidden;      // T x d_llm
  HeadDistributions heads;
  double kl = 0.0;
};

ForwardResult Forward(const GroundingModel& model, const TrainingExample& example);

LossTerms ExampleLoss(const GroundingModel& model, const TrainingExample& example,
                      const LossConfig& config);

}  // namespace groundit

#endif  // GROUNDIT_GROUNDING_MODEL_H_
