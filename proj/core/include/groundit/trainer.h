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

#ifndef GROUNDIT_TRAINER_H_
#define GROUNDIT_TRAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "groundit/alignment_loss.h"
#include "groundit/grounding_model.h"

namespace groundit {

struct TrainOptions {
  LossConfig loss;
  // Heads always use analytic gradients. The remaining trainables (g_phi,
  // W_proj, final-layer LoRA) use central finite differences, which is only
  // affordable at desk scale.
  bool update_non_head = true;
  double fd_step = 1e-6;
};

// Mean loss terms over the batch.
LossTerms BatchLoss(const GroundingModel& model, std::span<const TrainingExample> batch,
                    const LossConfig& config);

// One plain gradient-descent step on the mean batch loss. Returns the loss
// before the update. Throws NonFiniteError if the loss is not finite.
LossTerms GradStep(GroundingModel& model, std::span<const TrainingExample> batch,
                   const TrainOptions& options);

// options.loss.steps calls to GradStep; the returned trace holds the loss
// before each step followed by the final loss.
std::vector<LossTerms> Train(GroundingModel& model, std::span<const TrainingExample> batch,
                             const TrainOptions& options);

struct GradientCheckOptions {
  std::uint64_t seed = 20240607;
  int instances = 100;
  double tolerance = 1e-5;
  double step = 1e-5;
  // Test hook: perturbs every analytic gradient so the harness must fail.
  bool corrupt_analytic = false;
};

struct GradientCheckResult {
  std::string name;
  int instances = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

// ||a - f|| / max(||a||, ||f||, 1e-8) for analytic a and finite-difference f.
double RelativeError(std::span<const double> analytic, std::span<const double> numeric);

// Analytic-vs-central-difference checks over seeded random instances:
// start/end head cross-entropy, KL alignment w.r.t. diffusion features, and
// KL(softmax(x) || q) w.r.t. x.
std::vector<GradientCheckResult> RunGradientChecks(const GradientCheckOptions& options);

}  // namespace groundit

#endif  // GROUNDIT_TRAINER_H_
