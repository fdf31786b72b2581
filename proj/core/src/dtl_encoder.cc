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

#include "groundit/dtl_encoder.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {

std::string_view ScheduleName(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "linear";
}

std::optional<ScheduleKind> ParseScheduleKind(std::string_view name) {
  if (name == "cosine") return ScheduleKind::kCosine;
  if (name == "linear") return ScheduleKind::kLinear;
  return std::nullopt;
}

ScheduleCoeffs ScheduleCoefficients(double tau, ScheduleKind kind) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("ScheduleCoefficients: tau must lie in [0, 1]");
  }
  double abar = 1.0;
  if (kind == ScheduleKind::kCosine) {
    constexpr double s = kCosineOffset;
    const double half_pi = std::numbers::pi / 2.0;
    const double num = std::cos((tau + s) / (1.0 + s) * half_pi);
    const double den = std::cos(s / (1.0 + s) * half_pi);
    abar = (num * num) / (den * den);
  } else {
    abar = 1.0 - tau * (1.0 - kLinearAlphaBarFloor);
  }
  abar = std::clamp(abar, 0.0, 1.0);
  return {std::sqrt(abar), std::sqrt(1.0 - abar)};
}

VideoTensor::VideoTensor(int frames, int positions, int channels)
    : VideoTensor(frames, positions, channels,
                  std::vector<double>(static_cast<std::size_t>(std::max(frames, 0)) *
                                      std::max(positions, 0) * std::max(channels, 0))) {}

VideoTensor::VideoTensor(int frames, int positions, int channels, std::vector<double> values)
    : frames_(frames), positions_(positions), channels_(channels), values_(std::move(values)) {
  if (frames < 0 || positions < 0 || channels < 0) {
    throw std::invalid_argument("VideoTensor: negative dimension");
  }
  if (values_.size() != static_cast<std::size_t>(frames) * positions * channels) {
    throw std::invalid_argument("VideoTensor: value count does not match shape");
  }
}

std::span<double> VideoTensor::frame(int t) {
  return {values_.data() + static_cast<std::size_t>(t) * frame_width(),
          static_cast<std::size_t>(frame_width())};
}

std::span<const double> VideoTensor::frame(int t) const {
  return {values_.data() + static_cast<std::size_t>(t) * frame_width(),
          static_cast<std::size_t>(frame_width())};
}

std::span<const double> VideoTensor::vector_at(int t, int p) const {
  return {values_.data() + Offset(t, p, 0), static_cast<std::size_t>(channels_)};
}

DenseMatrix VideoTensor::AsMatrix() const {
  return DenseMatrix(frames_, frame_width(), values_);
}

VideoTensor VideoTensor::FromMatrix(const DenseMatrix& m, int positions) {
  if (positions < 1 || m.cols() % positions != 0) {
    throw std::invalid_argument("VideoTensor::FromMatrix: width " + std::to_string(m.cols()) +
                                " is not divisible by " + std::to_string(positions) +
                                " positions");
  }
  const auto v = m.values();
  return VideoTensor(static_cast<int>(m.rows()), positions,
                     static_cast<int>(m.cols()) / positions,
                     std::vector<double>(v.begin(), v.end()));
}

void DTLConfig::Validate() const {
  if (!(tau0 > 0.0 && tau0 < 1.0)) throw std::invalid_argument("tau0 must lie in (0, 1)");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!std::isfinite(guidance)) throw std::invalid_argument("guidance must be finite");
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  if (segments < 1 || frames % segments != 0) {
    throw std::invalid_argument("frames (" + std::to_string(frames) +
                                ") must be divisible by segments (" +
                                std::to_string(segments) + ")");
  }
  if (embed_dim < 1) throw std::invalid_argument("embed_dim must be >= 1");
}

StubDenoiser::StubDenoiser(int channels, int steps, std::uint64_t seed) : steps_(steps) {
  if (channels < 1 || steps < 1) {
    throw std::invalid_argument("StubDenoiser: channels and steps must be >= 1");
  }
  Rng rng(seed);
  weights_ = GaussianMatrix(channels, channels, 1.0 / std::sqrt(channels), rng);
}

FeatureGrid StubDenoiser::Denoise(const LatentVideo& noised,
                                  const DiffusionCondition& condition, double /*tau*/) const {
  if (noised.channels() != static_cast<int>(weights_.cols())) {
    throw std::invalid_argument("StubDenoiser: expected " + std::to_string(weights_.cols()) +
                                " channels, got " + std::to_string(noised.channels()));
  }
  const bool conditioned = !condition.masks.empty();
  if (conditioned && static_cast<int>(condition.masks.size()) != noised.frames()) {
    throw std::invalid_argument("StubDenoiser: mask count must equal frame count");
  }
  FeatureGrid out(noised.frames(), noised.positions(), noised.channels());
  for (int t = 0; t < noised.frames(); ++t) {
    const double gain = 1.0 + (conditioned ? condition.masks[t].coverage() : 0.0);
    for (int p = 0; p < noised.positions(); ++p) {
      const auto in = noised.vector_at(t, p);
      std::vector<double> h(in.begin(), in.end());
      for (int s = 0; s < steps_; ++s) {
        h = Matvec(weights_, h);
        for (double& v : h) v *= gain;
      }
      std::copy(h.begin(), h.end(), &out.at(t, p, 0));
    }
  }
  return out;
}

LatentVideo ForwardNoise(const LatentVideo& x0, double tau, ScheduleKind kind,
                         std::uint64_t seed) {
  const std::vector<double> taus(static_cast<std::size_t>(x0.frames()), tau);
  return ForwardNoise(x0, taus, kind, seed);
}

LatentVideo ForwardNoise(const LatentVideo& x0, std::span<const double> frame_taus,
                         ScheduleKind kind, std::uint64_t seed) {
  if (static_cast<int>(frame_taus.size()) != x0.frames()) {
    throw std::invalid_argument("ForwardNoise: one tau per frame required");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LatentVideo out = x0;
  for (int t = 0; t < x0.frames(); ++t) {
    const auto [alpha, sigma] = ScheduleCoefficients(frame_taus[t], kind);
    for (double& v : out.frame(t)) v = alpha * v + sigma * normal(rng);
  }
  return out;
}

std::vector<double> SegmentTaus(int frames, int segments, double tau0, std::uint64_t seed) {
  if (frames < 1 || segments < 1 || frames % segments != 0) {
    throw std::invalid_argument("SegmentTaus: frames (" + std::to_string(frames) +
                                ") must be divisible by segments (" +
                                std::to_string(segments) + ")");
  }
  if (!(tau0 > 0.0 && tau0 < 1.0)) throw std::invalid_argument("SegmentTaus: tau0 in (0, 1)");
  constexpr double kEdge = 1e-6;
  Rng rng(seed);
  std::uniform_real_distribution<double> band(0.5 * tau0, 1.5 * tau0);
  const int per_segment = frames / segments;
  std::vector<double> taus(frames);
  for (int k = 0; k < segments; ++k) {
    const double tau = std::clamp(band(rng), kEdge, 1.0 - kEdge);
    std::fill_n(taus.begin() + k * per_segment, per_segment, tau);
  }
  return taus;
}

namespace {

FeatureGrid CheckedDenoise(const Denoiser& denoiser, const LatentVideo& noised,
                           const DiffusionCondition& condition, double tau) {
  FeatureGrid h = denoiser.Denoise(noised, condition, tau);
  if (h.frames() != noised.frames() || h.positions() != noised.positions() ||
      h.channels() < 1) {
    throw ContractViolation("denoiser returned " + std::to_string(h.frames()) + "x" +
                            std::to_string(h.positions()) + " features for a " +
                            std::to_string(noised.frames()) + "x" +
                            std::to_string(noised.positions()) + " latent");
  }
  return h;
}

}  // namespace

FeatureGrid ExtractFeatures(const LatentVideo& x0, const DiffusionCondition& condition,
                            const DTLConfig& config, const Denoiser& denoiser,
                            std::uint64_t seed) {
  config.Validate();
  LatentVideo noised;
  if (config.segment_noise) {
    const auto taus = SegmentTaus(x0.frames(), config.segments, config.tau0, seed ^ 0x5e9u);
    noised = ForwardNoise(x0, taus, config.schedule, seed);
  } else {
    noised = ForwardNoise(x0, config.tau0, config.schedule, seed);
  }
  FeatureGrid conditioned = CheckedDenoise(denoiser, noised, condition, config.tau0);
  if (config.guidance == 1.0) return conditioned;
  const FeatureGrid unconditioned =
      CheckedDenoise(denoiser, noised, DiffusionCondition::Unconditioned(), config.tau0);
  if (!unconditioned.SameShape(conditioned)) {
    throw ContractViolation("conditioned and unconditioned features differ in shape");
  }
  FeatureGrid out = unconditioned;
  auto dst = out.values();
  const auto c = conditioned.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += config.guidance * (c[i] - dst[i]);
  return out;
}

std::vector<double> Projection::Apply(std::span<const double> x) const {
  if (bias.size() != weights.rows()) {
    throw std::invalid_argument("Projection: bias length does not match output width");
  }
  auto y = Matvec(weights, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
  return y;
}

DenseMatrix PoolFrames(const FeatureGrid& h) {
  DenseMatrix pooled(h.frames(), h.channels());
  if (h.positions() == 0) return pooled;
  const double inv = 1.0 / h.positions();
  for (int t = 0; t < h.frames(); ++t) {
    auto row = pooled.row(t);
    for (int p = 0; p < h.positions(); ++p) {
      const auto v = h.vector_at(t, p);
      for (int c = 0; c < h.channels(); ++c) row[c] += v[c];
    }
    for (double& v : row) v *= inv;
  }
  return pooled;
}

DenseMatrix PoolProject(const FeatureGrid& h, const Projection& projection) {
  if (projection.weights.cols() != static_cast<std::size_t>(h.channels())) {
    throw std::invalid_argument("PoolProject: projection expects " +
                                std::to_string(projection.weights.cols()) +
                                " channels, features have " + std::to_string(h.channels()));
  }
  if (h.positions() < 1) throw std::invalid_argument("PoolProject: no feature positions");
  const DenseMatrix pooled = PoolFrames(h);
  DenseMatrix z(h.frames(), projection.weights.rows());
  for (int t = 0; t < h.frames(); ++t) {
    const auto y = projection.Apply(pooled.row(t));
    std::copy(y.begin(), y.end(), z.row(t).begin());
  }
  return z;
}

}  // namespace groundit
