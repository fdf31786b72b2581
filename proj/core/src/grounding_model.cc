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

#include "groundit/grounding_model.h"

#include <cmath>
#include <stdexcept>

#include "groundit/random.h"

namespace groundit {

std::vector<std::span<double>> Trainables::NonHeadBlocks() {
  return {g_phi.weights.values(), g_phi.bias,       fusion.w_proj.values(),
          fusion.b_proj,          final_lora.a.values(), final_lora.b.values()};
}

GroundingModel GroundingModel::Seeded(const ModelDims& dims, const TokenBudgets& budgets,
                                      int num_bins, std::uint64_t seed) {
  if (dims.time_dim < 2 || dims.time_dim % 2 != 0) {
    throw std::invalid_argument("GroundingModel: time_dim must be even");
  }
  Rng rng(seed);
  const auto inv_sqrt = [](int n) { return 1.0 / std::sqrt(static_cast<double>(n)); };
  GroundingModel m;
  m.dims = dims;
  m.frozen.backbone = BackboneStub::Seeded(dims.llm_dim, rng());
  m.frozen.assembly.budgets = budgets;
  m.frozen.assembly.num_bins = num_bins;
  m.frozen.assembly.time_projection =
      GaussianMatrix(dims.llm_dim, dims.time_dim, inv_sqrt(dims.time_dim), rng);
  m.frozen.object_projection =
      GaussianMatrix(dims.llm_dim, dims.frame_dim, inv_sqrt(dims.frame_dim), rng);

  auto& tr = m.trainables;
  tr.heads.w_start = GaussianVector(dims.llm_dim, 0.01, rng);
  tr.heads.w_end = GaussianVector(dims.llm_dim, 0.01, rng);
  tr.g_phi.weights =
      GaussianMatrix(dims.frame_dim, dims.feature_channels, inv_sqrt(dims.feature_channels), rng);
  tr.g_phi.bias.assign(dims.frame_dim, 0.0);
  const int concat = dims.frame_dim + dims.text_dim + dims.time_dim;
  tr.fusion.w_proj = GaussianMatrix(dims.llm_dim, concat, inv_sqrt(concat), rng);
  tr.fusion.b_proj.assign(dims.llm_dim, 0.0);
  tr.final_lora = LoraAdapter::Zero(dims.llm_dim, dims.llm_dim, dims.lora_rank, dims.lora_alpha);
  tr.final_lora.b = GaussianMatrix(dims.lora_rank, dims.llm_dim, inv_sqrt(dims.llm_dim), rng);
  return m;
}

ForwardResult Forward(const GroundingModel& model, const TrainingExample& example) {
  const auto& tr = model.trainables;
  const int frames = static_cast<int>(example.pooled_features.rows());
  if (frames < 1) throw std::invalid_argument("Forward: example has no frames");

  ForwardResult out;
  out.frame_embeddings = DenseMatrix(frames, tr.g_phi.weights.rows());
  for (int t = 0; t < frames; ++t) {
    const auto z = tr.g_phi.Apply(example.pooled_features.row(t));
    std::copy(z.begin(), z.end(), out.frame_embeddings.row(t).begin());
  }

  const auto tau = NormalizeTimestamps(frames);
  std::vector<std::vector<double>> fused;
  fused.reserve(frames);
  for (int t = 0; t < frames; ++t) {
    const auto e_time = SinusoidalEncoding(tau[t], model.dims.time_dim);
    fused.push_back(Fuse(out.frame_embeddings.row(t), example.text_embedding, e_time, tr.fusion));
  }

  std::vector<std::vector<double>> objects;
  objects.reserve(example.tracks.size());
  for (const auto& track : example.tracks) {
    objects.push_back(
        ObjectEmbedding(out.frame_embeddings, track, model.frozen.object_projection));
  }

  out.sequence = AssembleSequence(example.text_tokens, objects, fused, model.frozen.assembly);
  BackboneAdapters adapters;
  adapters[kFinalLayer] = tr.final_lora;
  const DenseMatrix hidden = ForwardBackbone(out.sequence, model.frozen.backbone, adapters);
  out.video_hidden = VideoRows(hidden, out.sequence);
  out.heads = ComputeHeadDistributions(out.video_hidden, tr.heads);
  out.kl = KlAlignmentLoss({out.frame_embeddings, example.aux_features});
  return out;
}

LossTerms ExampleLoss(const GroundingModel& model, const TrainingExample& example,
                      const LossConfig& config) {
  const auto fwd = Forward(model, example);
  return TotalLoss(fwd.heads.start, fwd.heads.end, example.target, fwd.kl, config);
}

}  // namespace groundit
