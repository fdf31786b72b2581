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

#include "groundit/alignment_loss.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "groundit/random.h"

namespace groundit {
namespace {

void CheckPair(const FeaturePair& pair) {
  if (pair.diff.rows() != pair.aux.rows() || pair.diff.cols() != pair.aux.cols()) {
    throw std::invalid_argument("FeaturePair: diffusion features are " +
                                std::to_string(pair.diff.rows()) + "x" +
                                std::to_string(pair.diff.cols()) + ", auxiliary features are " +
                                std::to_string(pair.aux.rows()) + "x" +
                                std::to_string(pair.aux.cols()));
  }
  if (pair.diff.rows() == 0) throw std::invalid_argument("FeaturePair: no frames");
}

}  // namespace

FrameDistributions FeatureDistributions(const FeaturePair& pair) {
  CheckPair(pair);
  FrameDistributions out;
  out.diff.reserve(pair.diff.rows());
  out.aux.reserve(pair.aux.rows());
  for (std::size_t t = 0; t < pair.diff.rows(); ++t) {
    out.diff.push_back(Softmax(pair.diff.row(t)));
    out.aux.push_back(Softmax(pair.aux.row(t)));
  }
  return out;
}

double KlAlignmentLoss(const FeaturePair& pair) {
  const auto dists = FeatureDistributions(pair);
  double sum = 0.0;
  for (std::size_t t = 0; t < dists.diff.size(); ++t) {
    sum += KlDivergence(dists.diff[t], dists.aux[t]);
  }
  return sum / static_cast<double>(dists.diff.size());
}

DenseMatrix KlAlignmentGradient(const FeaturePair& pair) {
  const auto dists = FeatureDistributions(pair);
  const double inv_t = 1.0 / static_cast<double>(dists.diff.size());
  DenseMatrix grad(pair.diff.rows(), pair.diff.cols());
  for (std::size_t t = 0; t < dists.diff.size(); ++t) {
    const auto& p = dists.diff[t];
    const auto& q = dists.aux[t];
    // Unclamped KL so the gradient stays exact when p and q nearly agree.
    double kl = 0.0;
    std::vector<double> log_ratio(p.size(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] <= 0.0) continue;
      log_ratio[j] = std::log(p[j]) - std::log(std::max(q[j], kKlFloor));
      kl += p[j] * log_ratio[j];
    }
    auto row = grad.row(t);
    for (std::size_t j = 0; j < p.size(); ++j) row[j] = inv_t * p[j] * (log_ratio[j] - kl);
  }
  return grad;
}

StubAuxEncoder::StubAuxEncoder(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
  if (in_dim < 1 || out_dim < 1) {
    throw std::invalid_argument("StubAuxEncoder: dimensions must be >= 1");
  }
  Rng rng(seed);
  weights_ = GaussianMatrix(out_dim, in_dim, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
  bias_ = GaussianVector(out_dim, 0.1, rng);
}

std::vector<double> StubAuxEncoder::Encode(std::span<const double> frame) const {
  auto y = Matvec(weights_, frame);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias_[i];
  return y;
}

DenseMatrix EncodeFrames(const AuxEncoder& encoder, const DenseMatrix& frames) {
  DenseMatrix out(frames.rows(), encoder.dim());
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto y = encoder.Encode(frames.row(t));
    if (y.size() != encoder.dim()) {
      throw std::invalid_argument("EncodeFrames: encoder returned the wrong width");
    }
    std::copy(y.begin(), y.end(), out.row(t).begin());
  }
  return out;
}

LossTerms TotalLoss(const ProbVector& p_start, const ProbVector& p_end, const FrameSpan& target,
                    double kl, const LossConfig& config) {
  const int frames = static_cast<int>(p_start.size());
  if (p_end.size() != p_start.size()) {
    throw std::invalid_argument("TotalLoss: start/end lengths differ");
  }
  if (target.first < 1 || target.first > target.last || target.last > frames) {
    throw std::invalid_argument("TotalLoss: target span [" + std::to_string(target.first) +
                                ", " + std::to_string(target.last) + "] outside [1, " +
                                std::to_string(frames) + "]");
  }
  LossTerms terms;
  terms.ce_start = -std::log(p_start[target.first - 1]);
  terms.ce_end = -std::log(p_end[target.last - 1]);
  terms.kl = kl;
  terms.total = terms.ce_start + terms.ce_end + config.lambda_kl * kl;
  return terms;
}

std::vector<double> HeadCrossEntropyGradient(const DenseMatrix& video_hidden,
                                             const ProbVector& probs, int target) {
  if (probs.size() != video_hidden.rows()) {
    throw std::invalid_argument("HeadCrossEntropyGradient: probability length mismatch");
  }
  if (target < 1 || target > static_cast<int>(probs.size())) {
    throw std::invalid_argument("HeadCrossEntropyGradient: target out of range");
  }
  std::vector<double> residual(probs.probs().begin(), probs.probs().end());
  residual[target - 1] -= 1.0;
  return MatvecTransposed(video_hidden, residual);
}

void WriteLossTraceCsv(std::ostream& out, const std::vector<LossTerms>& trace) {
  out << "step,ce_s,ce_e,kl,total\n";
  char buf[160];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& t = trace[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", i, t.ce_start, t.ce_end,
                  t.kl, t.total);
    out << buf;
  }
}

}  // namespace groundit
