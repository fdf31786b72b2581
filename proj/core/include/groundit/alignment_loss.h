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

#ifndef GROUNDIT_ALIGNMENT_LOSS_H_
#define GROUNDIT_ALIGNMENT_LOSS_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "groundit/grounding_gate.h"
#include "groundit/numerics.h"

namespace groundit {

// Per-frame diffusion features and auxiliary reference features, both
// frames x D_h.
struct FeaturePair {
  DenseMatrix diff;
  DenseMatrix aux;
};

struct FrameDistributions {
  std::vector<ProbVector> diff;
  std::vector<ProbVector> aux;
};

// Row-wise softmax (temperature 1, along the feature axis).
FrameDistributions FeatureDistributions(const FeaturePair& pair);

// (1 / T) sum_t KL(p_diff^t || p_aux^t).
double KlAlignmentLoss(const FeaturePair& pair);

// d KlAlignmentLoss / d pair.diff. For one frame with p = softmax(f_diff) and
// q = softmax(f_aux): p_j (ln p_j - ln q_j - KL) / T.
DenseMatrix KlAlignmentGradient(const FeaturePair& pair);

// Reference features computed from the whole frame, without masks.
class AuxEncoder {
 public:
  virtual ~AuxEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> Encode(std::span<const double> frame) const = 0;
};

// Seeded affine map over the flattened frame latent.
class StubAuxEncoder final : public AuxEncoder {
 public:
  StubAuxEncoder(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

  std::size_t dim() const override { return weights_.rows(); }
  std::vector<double> Encode(std::span<const double> frame) const override;

 private:
  DenseMatrix weights_;
  std::vector<double> bias_;
};

// Encodes every row of `frames`.
DenseMatrix EncodeFrames(const AuxEncoder& encoder, const DenseMatrix& frames);

struct LossConfig {
  double lambda_kl = 0.1;
  double learning_rate = 1e-2;
  int steps = 50;
};

struct LossTerms {
  double ce_start = 0.0;
  double ce_end = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

// -ln p_s(s*) - ln p_e(e*) + lambda kl. Throws std::invalid_argument unless
// 1 <= s* <= e* <= T.
LossTerms TotalLoss(const ProbVector& p_start, const ProbVector& p_end, const FrameSpan& target,
                    double kl, const LossConfig& config);

// Gradient of -ln softmax(H w)[target] with respect to w: sum_t (p_t - [t = target]) h_t.
// `target` is 1-based.
std::vector<double> HeadCrossEntropyGradient(const DenseMatrix& video_hidden,
                                             const ProbVector& probs, int target);

// CSV with header "step,ce_s,ce_e,kl,total".
void WriteLossTraceCsv(std::ostream& out, const std::vector<LossTerms>& trace);

}  // namespace groundit

#endif  // GROUNDIT_ALIGNMENT_LOSS_H_
