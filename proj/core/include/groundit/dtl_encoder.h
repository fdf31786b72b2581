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

#ifndef GROUNDIT_DTL_ENCODER_H_
#define GROUNDIT_DTL_ENCODER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groundit/mask_codec.h"
#include "groundit/numerics.h"

namespace groundit {

// Diffusion temporal latents: noise a clean video latent to an early diffusion
// time, query a (frozen) denoiser under mask conditioning, and pool/project the
// features into one embedding per frame.

enum class ScheduleKind { kLinear, kCosine };

std::string_view ScheduleName(ScheduleKind kind);
std::optional<ScheduleKind> ParseScheduleKind(std::string_view name);

struct ScheduleCoeffs {
  double alpha = 1.0;
  double sigma = 0.0;
};

inline constexpr double kCosineOffset = 0.008;
inline constexpr double kLinearAlphaBarFloor = 1e-4;

// Variance-preserving coefficients (sqrt(abar), sqrt(1 - abar)).
//   cosine: abar(tau) = cos^2(((tau + s) / (1 + s)) pi/2) / cos^2((s / (1 + s)) pi/2)
//   linear: abar(tau) = 1 - tau (1 - 1e-4)
// Throws std::invalid_argument for tau outside [0, 1].
ScheduleCoeffs ScheduleCoefficients(double tau, ScheduleKind kind);

// Dense frames x positions x channels tensor. Used both for clean/noised latents
// and for denoiser feature maps.
class VideoTensor {
 public:
  VideoTensor() = default;
  VideoTensor(int frames, int positions, int channels);
  VideoTensor(int frames, int positions, int channels, std::vector<double> values);

  int frames() const { return frames_; }
  int positions() const { return positions_; }
  int channels() const { return channels_; }
  // Values per frame (positions * channels).
  int frame_width() const { return positions_ * channels_; }

  double& at(int t, int p, int c) { return values_[Offset(t, p, c)]; }
  double at(int t, int p, int c) const { return values_[Offset(t, p, c)]; }

  std::span<double> frame(int t);
  std::span<const double> frame(int t) const;
  std::span<const double> vector_at(int t, int p) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // View as a frames x (positions * channels) matrix and back.
  DenseMatrix AsMatrix() const;
  static VideoTensor FromMatrix(const DenseMatrix& m, int positions);

  bool SameShape(const VideoTensor& other) const {
    return frames_ == other.frames_ && positions_ == other.positions_ &&
           channels_ == other.channels_;
  }
  bool operator==(const VideoTensor&) const = default;

 private:
  std::size_t Offset(int t, int p, int c) const {
    return (static_cast<std::size_t>(t) * positions_ + p) * channels_ + c;
  }

  int frames_ = 0;
  int positions_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

using LatentVideo = VideoTensor;
using FeatureGrid = VideoTensor;

// Conditioning c = (masks, highlight instruction). Empty masks mean
// unconditioned.
struct DiffusionCondition {
  std::vector<BinaryMask> masks;
  std::string highlight_text = "highlight the masked region";

  static DiffusionCondition Unconditioned() { return {{}, ""}; }
};

struct DTLConfig {
  double tau0 = 0.1;
  int steps = 4;
  ScheduleKind schedule = ScheduleKind::kCosine;
  double guidance = 1.0;
  int frames = 96;
  int segments = 12;
  int embed_dim = 8;
  // Noise each segment at its own jittered time instead of tau0 (training-time
  // temporal noise injection).
  bool segment_noise = false;

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
};

class Denoiser {
 public:
  virtual ~Denoiser() = default;
  // Must return one feature map per input frame and position.
  virtual FeatureGrid Denoise(const LatentVideo& noised, const DiffusionCondition& condition,
                              double tau) const = 0;
};

// Reference denoiser with a closed form: each position vector is mapped
// through a seeded square matrix W and scaled by (1 + coverage of M_t), and the
// map is applied `steps` times:
//   h[t, p] = ((1 + cov_t) W)^steps x[t, p]
// The highlight text does not affect the output.
class StubDenoiser final : public Denoiser {
 public:
  StubDenoiser(int channels, int steps, std::uint64_t seed);

  FeatureGrid Denoise(const LatentVideo& noised, const DiffusionCondition& condition,
                      double tau) const override;

  const DenseMatrix& weights() const { return weights_; }
  int steps() const { return steps_; }

 private:
  DenseMatrix weights_;
  int steps_;
};

// x_tau = alpha x0 + sigma eps, with eps drawn from a standard normal stream
// seeded by `seed` in tensor order.
LatentVideo ForwardNoise(const LatentVideo& x0, double tau, ScheduleKind kind,
                         std::uint64_t seed);
// Per-frame diffusion times; frame_taus.size() must equal x0.frames().
LatentVideo ForwardNoise(const LatentVideo& x0, std::span<const double> frame_taus,
                         ScheduleKind kind, std::uint64_t seed);

// Splits `frames` into `segments` equal blocks and draws one time per block,
// uniformly from [tau0 / 2, 3 tau0 / 2] clipped into (0, 1).
std::vector<double> SegmentTaus(int frames, int segments, double tau0, std::uint64_t seed);

// h = denoiser(forward_noise(x0, tau0), c, tau0), blended with the
// unconditioned call as h_u + GS (h_c - h_u) when GS != 1. Throws
// ContractViolation if the denoiser output does not match frames/positions.
FeatureGrid ExtractFeatures(const LatentVideo& x0, const DiffusionCondition& condition,
                            const DTLConfig& config, const Denoiser& denoiser,
                            std::uint64_t seed);

// Affine head g_phi: weights is d x channels.
struct Projection {
  DenseMatrix weights;
  std::vector<double> bias;

  std::vector<double> Apply(std::span<const double> x) const;
};

// Mean over each frame's positions (spatial pooling, frames kept).
DenseMatrix PoolFrames(const FeatureGrid& h);

// z_t = g_phi(mean_p h[t, p]); returns frames x d.
DenseMatrix PoolProject(const FeatureGrid& h, const Projection& projection);

}  // namespace groundit

#endif  // GROUNDIT_DTL_ENCODER_H_
