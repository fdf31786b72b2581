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

#include "groundit/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {

LossTerms BatchLoss(const GroundingModel& model, std::span<const TrainingExample> batch,
                    const LossConfig& config) {
  if (batch.empty()) throw std::invalid_argument("BatchLoss: empty batch");
  LossTerms mean;
  for (const auto& ex : batch) {
    const auto t = ExampleLoss(model, ex, config);
    mean.ce_start += t.ce_start;
    mean.ce_end += t.ce_end;
    mean.kl += t.kl;
    mean.total += t.total;
  }
  const double n = static_cast<double>(batch.size());
  mean.ce_start /= n;
  mean.ce_end /= n;
  mean.kl /= n;
  mean.total /= n;
  return mean;
}

LossTerms GradStep(GroundingModel& model, std::span<const TrainingExample> batch,
                   const TrainOptions& options) {
  if (batch.empty()) throw std::invalid_argument("GradStep: empty batch");
  const double n = static_cast<double>(batch.size());
  const std::size_t d = model.trainables.heads.w_start.size();

  LossTerms mean;
  std::vector<double> grad_start(d, 0.0);
  std::vector<double> grad_end(d, 0.0);
  for (const auto& ex : batch) {
    const auto fwd = Forward(model, ex);
    const auto t = TotalLoss(fwd.heads.start, fwd.heads.end, ex.target, fwd.kl, options.loss);
    mean.ce_start += t.ce_start / n;
    mean.ce_end += t.ce_end / n;
    mean.kl += t.kl / n;
    mean.total += t.total / n;
    const auto gs = HeadCrossEntropyGradient(fwd.video_hidden, fwd.heads.start, ex.target.first);
    const auto ge = HeadCrossEntropyGradient(fwd.video_hidden, fwd.heads.end, ex.target.last);
    for (std::size_t i = 0; i < d; ++i) {
      grad_start[i] += gs[i] / n;
      grad_end[i] += ge[i] / n;
    }
  }
  if (!std::isfinite(mean.total)) {
    throw NonFiniteError("GradStep: loss is not finite (ce_s=" + std::to_string(mean.ce_start) +
                         ", ce_e=" + std::to_string(mean.ce_end) +
                         ", kl=" + std::to_string(mean.kl) + ")");
  }

  // Finite differences for the remaining blocks, all taken at the pre-step
  // parameters before any update is applied.
  std::vector<std::vector<double>> fd_grads;
  if (options.update_non_head) {
    const auto objective = [&] { return BatchLoss(model, batch, options.loss).total; };
    for (auto block : model.trainables.NonHeadBlocks()) {
      std::vector<double> g(block.size());
      for (std::size_t i = 0; i < block.size(); ++i) {
        const double saved = block[i];
        block[i] = saved + options.fd_step;
        const double up = objective();
        block[i] = saved - options.fd_step;
        const double down = objective();
        block[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
          throw NonFiniteError("GradStep: non-finite loss while probing parameters");
        }
        g[i] = (up - down) / (2.0 * options.fd_step);
      }
      fd_grads.push_back(std::move(g));
    }
  }

  const double lr = options.loss.learning_rate;
  auto& heads = model.trainables.heads;
  for (std::size_t i = 0; i < d; ++i) {
    heads.w_start[i] -= lr * grad_start[i];
    heads.w_end[i] -= lr * grad_end[i];
  }
  if (options.update_non_head) {
    auto blocks = model.trainables.NonHeadBlocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t i = 0; i < blocks[b].size(); ++i) blocks[b][i] -= lr * fd_grads[b][i];
    }
  }
  return mean;
}

std::vector<LossTerms> Train(GroundingModel& model, std::span<const TrainingExample> batch,
                             const TrainOptions& options) {
  std::vector<LossTerms> trace;
  trace.reserve(options.loss.steps + 1);
  for (int step = 0; step < options.loss.steps; ++step) {
    trace.push_back(GradStep(model, batch, options));
  }
  trace.push_back(BatchLoss(model, batch, options.loss));
  return trace;
}

double RelativeError(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) {
    throw std::invalid_argument("RelativeError: length mismatch");
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
  }
  const double scale = std::max({L2Norm(analytic), L2Norm(numeric), 1e-8});
  return std::sqrt(diff) / scale;
}

namespace {

struct CheckAccumulator {
  GradientCheckResult result;
  void Add(double err) {
    ++result.instances;
    result.max_relative_error = std::max(result.max_relative_error, err);
  }
};

void Corrupt(std::vector<double>& g) {
  for (double& v : g) v += 1e-3 * (1.0 + std::abs(v));
}

}  // namespace

std::vector<GradientCheckResult> RunGradientChecks(const GradientCheckOptions& options) {
  Rng rng(options.seed);
  std::uniform_int_distribution<int> frames_dist(2, 24);
  std::uniform_int_distribution<int> width_dist(2, 12);

  CheckAccumulator head_start{{"head_ce_start"}};
  CheckAccumulator head_end{{"head_ce_end"}};
  CheckAccumulator kl_align{{"kl_alignment"}};
  CheckAccumulator kl_softmax{{"kl_softmax"}};

  for (int n = 0; n < options.instances; ++n) {
    const int frames = frames_dist(rng);
    const int width = width_dist(rng);

    // Heads: loss(w) = -ln softmax(H w)[target].
    const DenseMatrix hidden = GaussianMatrix(frames, width, 1.0, rng);
    std::uniform_int_distribution<int> target_dist(1, frames);
    for (auto* acc : {&head_start, &head_end}) {
      const auto w = GaussianVector(width, 0.5, rng);
      const int target = target_dist(rng);
      const auto loss = [&](std::span<const double> x) {
        return -std::log(Softmax(Matvec(hidden, x))[target - 1]);
      };
      auto analytic = HeadCrossEntropyGradient(hidden, Softmax(Matvec(hidden, w)), target);
      if (options.corrupt_analytic) Corrupt(analytic);
      acc->Add(RelativeError(analytic, FiniteDiffGrad(loss, w, options.step)));
    }

    // KL alignment w.r.t. the diffusion features.
    {
      const DenseMatrix diff = GaussianMatrix(frames, width, 1.0, rng);
      const DenseMatrix aux = GaussianMatrix(frames, width, 1.0, rng);
      const auto loss = [&](std::span<const double> x) {
        return KlAlignmentLoss({DenseMatrix(frames, width, std::vector<double>(x.begin(), x.end())),
                                aux});
      };
      const DenseMatrix g = KlAlignmentGradient({diff, aux});
      std::vector<double> analytic(g.values().begin(), g.values().end());
      if (options.corrupt_analytic) Corrupt(analytic);
      kl_align.Add(RelativeError(analytic, FiniteDiffGrad(loss, diff.values(), options.step)));
    }

    // KL(softmax(x) || q) for a single distribution.
    {
      const auto x = GaussianVector(width, 1.0, rng);
      const ProbVector q = Softmax(GaussianVector(width, 1.0, rng));
      const auto loss = [&](std::span<const double> v) { return KlDivergence(Softmax(v), q); };
      const DenseMatrix xm(1, width, x);
      // Reuse the alignment gradient: one frame whose aux row has softmax q.
      std::vector<double> log_q(width);
      for (int j = 0; j < width; ++j) log_q[j] = std::log(q[j]);
      const DenseMatrix g = KlAlignmentGradient({xm, DenseMatrix(1, width, log_q)});
      std::vector<double> analytic(g.values().begin(), g.values().end());
      if (options.corrupt_analytic) Corrupt(analytic);
      kl_softmax.Add(RelativeError(analytic, FiniteDiffGrad(loss, x, options.step)));
    }
  }

  std::vector<GradientCheckResult> out;
  for (auto* acc : {&head_start, &head_end, &kl_align, &kl_softmax}) {
    acc->result.passed = acc->result.max_relative_error <= options.tolerance;
    out.push_back(acc->result);
  }
  return out;
}

}  // namespace groundit
