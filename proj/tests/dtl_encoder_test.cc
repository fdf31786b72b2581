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

#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {
namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

LatentVideo RandomLatent(int frames, int positions, int channels, std::uint64_t seed) {
  Rng rng(seed);
  return LatentVideo(frames, positions, channels,
                     GaussianVector(static_cast<std::size_t>(frames) * positions * channels, 1.0,
                                    rng));
}

TEST(ScheduleTest, CosineStartsAtCleanSignal) {
  const auto c = ScheduleCoefficients(0.0, ScheduleKind::kCosine);
  EXPECT_NEAR(c.alpha, 1.0, 1e-9);
  EXPECT_NEAR(c.sigma, 0.0, 1e-9);
}

TEST(ScheduleTest, LinearEndpointUsesFloor) {
  const auto c = ScheduleCoefficients(1.0, ScheduleKind::kLinear);
  EXPECT_NEAR(c.alpha, std::sqrt(1e-4), 1e-15);
  EXPECT_NEAR(c.sigma, std::sqrt(1.0 - 1e-4), 1e-15);
}

TEST(ScheduleTest, CosineMidpointMatchesWideClosedForm) {
  const Wide s("0.008");
  const Wide half_pi = boost::math::constants::half_pi<Wide>();
  const Wide tau("0.5");
  const Wide num = boost::multiprecision::cos((tau + s) / (1 + s) * half_pi);
  const Wide den = boost::multiprecision::cos(s / (1 + s) * half_pi);
  const Wide abar = (num * num) / (den * den);
  const auto c = ScheduleCoefficients(0.5, ScheduleKind::kCosine);
  EXPECT_NEAR(c.alpha, static_cast<double>(boost::multiprecision::sqrt(abar)), 1e-14);
  EXPECT_NEAR(c.sigma, static_cast<double>(boost::multiprecision::sqrt(1 - abar)), 1e-14);
}

TEST(ScheduleTest, UnitNormAndMonotoneOnGrid) {
  for (auto kind : {ScheduleKind::kCosine, ScheduleKind::kLinear}) {
    ScheduleCoeffs prev = ScheduleCoefficients(0.0, kind);
    for (int i = 0; i <= 1000; ++i) {
      const auto c = ScheduleCoefficients(i / 1000.0, kind);
      EXPECT_NEAR(c.alpha * c.alpha + c.sigma * c.sigma, 1.0, 1e-9);
      EXPECT_LE(c.alpha, prev.alpha);
      EXPECT_GE(c.sigma, prev.sigma);
      prev = c;
    }
  }
}

TEST(ScheduleTest, RejectsOutOfRangeTau) {
  EXPECT_THROW(ScheduleCoefficients(-0.1, ScheduleKind::kCosine), std::invalid_argument);
  EXPECT_THROW(ScheduleCoefficients(1.5, ScheduleKind::kLinear), std::invalid_argument);
}

TEST(ScheduleTest, NamesRoundTrip) {
  for (auto kind : {ScheduleKind::kCosine, ScheduleKind::kLinear}) {
    EXPECT_EQ(ParseScheduleKind(ScheduleName(kind)), kind);
  }
  EXPECT_FALSE(ParseScheduleKind("sigmoid").has_value());
}

TEST(ForwardNoiseTest, ZeroTimeKeepsLatent) {
  const auto x0 = RandomLatent(4, 2, 3, 1);
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto x = ForwardNoise(x0, 0.0, ScheduleKind::kCosine, seed);
    for (std::size_t i = 0; i < x.values().size(); ++i) {
      EXPECT_NEAR(x.values()[i], x0.values()[i], 1e-9);
    }
  }
}

TEST(ForwardNoiseTest, MomentsOfPureNoise) {
  const double tau = 0.3;
  const LatentVideo zero(10000, 1, 1);
  const auto x = ForwardNoise(zero, tau, ScheduleKind::kCosine, 7);
  const auto sigma = ScheduleCoefficients(tau, ScheduleKind::kCosine).sigma;
  const auto v = x.values();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double s : v) var += (s - mean) * (s - mean);
  var /= v.size() - 1;
  EXPECT_LE(std::abs(mean), 5.0 * sigma / std::sqrt(static_cast<double>(v.size())));
  // The sample variance of n normals has relative sd sqrt(2 / n).
  EXPECT_NEAR(var / (sigma * sigma), 1.0, 5.0 * std::sqrt(2.0 / v.size()));
}

TEST(ForwardNoiseTest, DeterministicForFixedSeed) {
  const auto x0 = RandomLatent(6, 2, 4, 3);
  EXPECT_EQ(ForwardNoise(x0, 0.4, ScheduleKind::kLinear, 5),
            ForwardNoise(x0, 0.4, ScheduleKind::kLinear, 5));
  EXPECT_NE(ForwardNoise(x0, 0.4, ScheduleKind::kLinear, 5),
            ForwardNoise(x0, 0.4, ScheduleKind::kLinear, 6));
}

TEST(ForwardNoiseTest, LinearInCleanLatentForFixedSeed) {
  const auto x0 = RandomLatent(5, 3, 2, 4);
  const double a = 2.5, tau = 0.2;
  LatentVideo scaled = x0;
  for (double& v : scaled.values()) v *= a;
  const auto n1 = ForwardNoise(x0, tau, ScheduleKind::kCosine, 11);
  const auto n2 = ForwardNoise(scaled, tau, ScheduleKind::kCosine, 11);
  const double alpha = ScheduleCoefficients(tau, ScheduleKind::kCosine).alpha;
  for (std::size_t i = 0; i < n1.values().size(); ++i) {
    EXPECT_NEAR(n2.values()[i] - n1.values()[i], alpha * (a - 1.0) * x0.values()[i], 1e-12);
  }
}

TEST(SegmentTausTest, EqualBlocksWithinBand) {
  const auto taus = SegmentTaus(96, 12, 0.1, 3);
  ASSERT_EQ(taus.size(), 96u);
  for (int k = 0; k < 12; ++k) {
    for (int j = 0; j < 8; ++j) EXPECT_EQ(taus[k * 8 + j], taus[k * 8]);
    EXPECT_GE(taus[k * 8], 0.05);
    EXPECT_LE(taus[k * 8], 0.15);
  }
}

TEST(SegmentTausTest, SingleSegmentSharesOneTime) {
  const auto taus = SegmentTaus(10, 1, 0.2, 4);
  for (double t : taus) EXPECT_EQ(t, taus[0]);
}

TEST(SegmentTausTest, Deterministic) {
  EXPECT_EQ(SegmentTaus(8, 4, 0.1, 9), SegmentTaus(8, 4, 0.1, 9));
  EXPECT_THROW(SegmentTaus(10, 4, 0.1, 9), std::invalid_argument);
}

DTLConfig SmallConfig(double guidance) {
  DTLConfig c;
  c.frames = 4;
  c.segments = 2;
  c.guidance = guidance;
  return c;
}

std::vector<BinaryMask> HalfMasks(int frames) {
  MaskGrid g(4, 4);
  for (int x = 0; x < 4; ++x) g.at(x, 0) = g.at(x, 1) = 1;
  return std::vector<BinaryMask>(frames, RleEncode(g));
}

TEST(ExtractFeaturesTest, GuidanceOneIsConditionedCallExactly) {
  const auto x0 = RandomLatent(4, 2, 3, 5);
  const StubDenoiser denoiser(3, 4, 6);
  const DiffusionCondition cond{HalfMasks(4)};
  const auto h = ExtractFeatures(x0, cond, SmallConfig(1.0), denoiser, 8);
  const auto noised = ForwardNoise(x0, 0.1, ScheduleKind::kCosine, 8);
  EXPECT_EQ(h, denoiser.Denoise(noised, cond, 0.1));
}

TEST(ExtractFeaturesTest, GuidanceZeroIsUnconditionedCall) {
  const auto x0 = RandomLatent(4, 2, 3, 5);
  const StubDenoiser denoiser(3, 4, 6);
  const auto h = ExtractFeatures(x0, {HalfMasks(4)}, SmallConfig(0.0), denoiser, 8);
  const auto noised = ForwardNoise(x0, 0.1, ScheduleKind::kCosine, 8);
  const auto u = denoiser.Denoise(noised, DiffusionCondition::Unconditioned(), 0.1);
  for (std::size_t i = 0; i < h.values().size(); ++i) {
    EXPECT_NEAR(h.values()[i], u.values()[i], 1e-12);
  }
}

TEST(StubDenoiserTest, MaskModulationFollowsClosedForm) {
  const auto x = RandomLatent(2, 1, 3, 12);
  const StubDenoiser denoiser(3, 2, 13);
  const std::vector<BinaryMask> empty(2, BinaryMask::Empty(2, 2));
  const std::vector<BinaryMask> full(2, BinaryMask::Full(2, 2));
  const auto he = denoiser.Denoise(x, {empty}, 0.1);
  const auto hf = denoiser.Denoise(x, {full}, 0.1);
  const auto& w = denoiser.weights();
  for (int t = 0; t < 2; ++t) {
    const auto v = x.vector_at(t, 0);
    const auto w2x = Matvec(w, Matvec(w, v));
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(he.at(t, 0, c), w2x[c], 1e-12);
      // Full coverage doubles the gain at each of the two steps.
      EXPECT_NEAR(hf.at(t, 0, c), 4.0 * w2x[c], 1e-12);
    }
  }
  EXPECT_NE(he, hf);
  EXPECT_EQ(he, denoiser.Denoise(x, DiffusionCondition::Unconditioned(), 0.1));
}

class ShortDenoiser final : public Denoiser {
 public:
  FeatureGrid Denoise(const LatentVideo& noised, const DiffusionCondition&,
                      double) const override {
    return FeatureGrid(noised.frames() - 1, noised.positions(), noised.channels());
  }
};

TEST(ExtractFeaturesTest, ShapeViolationIsReported) {
  const auto x0 = RandomLatent(4, 1, 2, 1);
  EXPECT_THROW(ExtractFeatures(x0, {}, SmallConfig(1.0), ShortDenoiser(), 1), ContractViolation);
}

TEST(PoolProjectTest, ConstantFramesProjectTheConstant) {
  FeatureGrid h(3, 4, 2);
  for (int t = 0; t < 3; ++t) {
    for (int p = 0; p < 4; ++p) {
      h.at(t, p, 0) = t + 1.0;
      h.at(t, p, 1) = -2.0;
    }
  }
  const Projection g{DenseMatrix::FromRows({{1.0, 1.0}, {2.0, 0.0}}), {0.5, 0.0}};
  const auto z = PoolProject(h, g);
  for (int t = 0; t < 3; ++t) {
    EXPECT_DOUBLE_EQ(z(t, 0), t + 1.0 - 2.0 + 0.5);
    EXPECT_DOUBLE_EQ(z(t, 1), 2.0 * (t + 1.0));
  }
}

TEST(PoolProjectTest, IdentityProjectionIsPooling) {
  const auto h = RandomLatent(3, 5, 2, 21);
  const auto z = PoolProject(h, {DenseMatrix::Identity(2), {0.0, 0.0}});
  EXPECT_EQ(z, PoolFrames(h));
}

TEST(PoolProjectTest, MatchesNaiveMeanThenMatvec) {
  const auto h = RandomLatent(5, 3, 4, 22);
  Rng rng(23);
  const Projection g{GaussianMatrix(6, 4, 1.0, rng), GaussianVector(6, 1.0, rng)};
  const auto z = PoolProject(h, g);
  for (int t = 0; t < 5; ++t) {
    for (int d = 0; d < 6; ++d) {
      long double acc = g.bias[d];
      for (int c = 0; c < 4; ++c) {
        long double mean = 0;
        for (int p = 0; p < 3; ++p) mean += h.at(t, p, c);
        acc += static_cast<long double>(g.weights(d, c)) * (mean / 3);
      }
      EXPECT_NEAR(z(t, d), static_cast<double>(acc), 1e-9);
    }
  }
}

TEST(PoolProjectTest, CommutesWithFramePermutation) {
  const auto h = RandomLatent(6, 2, 3, 24);
  Rng rng(25);
  const Projection g{GaussianMatrix(4, 3, 1.0, rng), GaussianVector(4, 1.0, rng)};
  const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  FeatureGrid permuted(6, 2, 3);
  for (int t = 0; t < 6; ++t) {
    std::copy(h.frame(perm[t]).begin(), h.frame(perm[t]).end(), permuted.frame(t).begin());
  }
  const auto z = PoolProject(h, g);
  const auto zp = PoolProject(permuted, g);
  for (int t = 0; t < 6; ++t) {
    for (int d = 0; d < 4; ++d) EXPECT_EQ(zp(t, d), z(perm[t], d));
  }
}

TEST(DTLConfigTest, DefaultsValidateAndBadFieldsThrow) {
  DTLConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.segments = 7;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = DTLConfig{};
  c.tau0 = 0.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(VideoTensorTest, MatrixRoundTrip) {
  const auto v = RandomLatent(3, 2, 4, 30);
  EXPECT_EQ(VideoTensor::FromMatrix(v.AsMatrix(), 2), v);
  EXPECT_THROW(VideoTensor::FromMatrix(v.AsMatrix(), 3), std::invalid_argument);
}

}  // namespace
}  // namespace groundit
