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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <sstream>

#include "groundit/random.h"
#include "test_support.h"

namespace groundit {
namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

FeaturePair RandomPair(std::size_t frames, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return {GaussianMatrix(frames, dim, 1.0, rng), GaussianMatrix(frames, dim, 1.0, rng)};
}

TEST(FeatureDistributionsTest, ConstantRowIsUniform) {
  const FeaturePair pair{DenseMatrix(1, 4, {2, 2, 2, 2}), DenseMatrix(1, 4, {0, 1, 2, 3})};
  const auto d = FeatureDistributions(pair);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(d.diff[0][j], 0.25);
}

TEST(FeatureDistributionsTest, EqualFeaturesGiveEqualDistributions) {
  const auto p = RandomPair(3, 5, 1);
  const auto d = FeatureDistributions({p.diff, p.diff});
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(d.diff[t], d.aux[t]);
}

TEST(FeatureDistributionsTest, RowsAreSoftmaxes) {
  const auto p = RandomPair(4, 6, 2);
  const auto d = FeatureDistributions(p);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(d.diff[t], Softmax(p.diff.row(t)));
    EXPECT_EQ(d.aux[t], Softmax(p.aux.row(t)));
  }
}

TEST(KlAlignmentLossTest, EqualFeaturesGiveZero) {
  const auto p = RandomPair(4, 8, 3);
  EXPECT_EQ(KlAlignmentLoss({p.diff, p.diff}), 0.0);
}

TEST(KlAlignmentLossTest, SingleFrameIsPlainKl) {
  const auto p = RandomPair(1, 5, 4);
  EXPECT_DOUBLE_EQ(KlAlignmentLoss(p), KlDivergence(Softmax(p.diff.row(0)), Softmax(p.aux.row(0))));
}

TEST(KlAlignmentLossTest, MatchesWideLoop) {
  const auto p = RandomPair(4, 8, 5);
  Wide total = 0;
  for (std::size_t t = 0; t < 4; ++t) {
    Wide zd = 0, za = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      zd += boost::multiprecision::exp(Wide(p.diff(t, j)));
      za += boost::multiprecision::exp(Wide(p.aux(t, j)));
    }
    for (std::size_t j = 0; j < 8; ++j) {
      const Wide pd = boost::multiprecision::exp(Wide(p.diff(t, j))) / zd;
      const Wide qa = boost::multiprecision::exp(Wide(p.aux(t, j))) / za;
      total += pd * boost::multiprecision::log(pd / qa);
    }
  }
  EXPECT_NEAR(KlAlignmentLoss(p), static_cast<double>(total / 4), 1e-14);
}

TEST(KlAlignmentLossTest, NonNegativeAndZeroOnlyWhenEqual) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = RandomPair(1 + seed % 5, 2 + seed % 7, seed);
    EXPECT_GT(KlAlignmentLoss(p), 0.0);
    auto shifted = p.diff;
    for (double& v : shifted.values()) v += 1.25;
    // A constant shift per row leaves the distributions unchanged.
    EXPECT_NEAR(KlAlignmentLoss({shifted, p.diff}), 0.0, 1e-15);
  }
}

TEST(KlAlignmentGradientTest, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = RandomPair(3, 6, 100 + seed);
    const auto analytic = KlAlignmentGradient(p);
    const ScalarFunction f = [&](std::span<const double> x) {
      return KlAlignmentLoss({DenseMatrix(3, 6, std::vector<double>(x.begin(), x.end())), p.aux});
    };
    const auto numeric = FiniteDiffGrad(f, p.diff.values(), 1e-5);
    std::vector<double> diff(numeric.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic.values()[i] - numeric[i];
    EXPECT_LE(L2Norm(diff) / std::max({L2Norm(analytic.values()), L2Norm(numeric), 1e-8}), 1e-5);
  }
}

TEST(TotalLossTest, PerfectHeadsWithoutKlGiveZero) {
  const auto one = ProbVector::FromProbs({0.0, 1.0, 0.0});
  const auto two = ProbVector::FromProbs({0.0, 0.0, 1.0});
  const auto t = TotalLoss(one, two, {2, 3}, 0.0, {});
  EXPECT_EQ(t.total, 0.0);
}

TEST(TotalLossTest, UniformHeadsGiveTwoLogT) {
  const auto u = ProbVector::FromProbs({0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(TotalLoss(u, u, {1, 4}, 0.0, {}).total, 2.0 * std::log(4.0), 1e-15);
}

TEST(TotalLossTest, TermByTermAndAdditiveInLambda) {
  Rng rng(6);
  const auto ps = testing::RandomDistribution(9, rng);
  const auto pe = testing::RandomDistribution(9, rng);
  LossConfig cfg;
  cfg.lambda_kl = 0.1;
  const auto t = TotalLoss(ps, pe, {3, 7}, 0.42, cfg);
  EXPECT_DOUBLE_EQ(t.ce_start, -std::log(ps[2]));
  EXPECT_DOUBLE_EQ(t.ce_end, -std::log(pe[6]));
  EXPECT_DOUBLE_EQ(t.kl, 0.42);
  EXPECT_NEAR(t.total, -std::log(ps[2]) - std::log(pe[6]) + 0.1 * 0.42, 1e-15);
  cfg.lambda_kl = 0.6;
  EXPECT_NEAR(TotalLoss(ps, pe, {3, 7}, 0.42, cfg).total - t.total, 0.5 * 0.42, 1e-14);
}

TEST(TotalLossTest, RejectsInvalidTarget) {
  const auto u = ProbVector::FromProbs({0.5, 0.5});
  EXPECT_THROW(TotalLoss(u, u, {2, 1}, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(TotalLoss(u, u, {1, 3}, 0.0, {}), std::invalid_argument);
}

TEST(HeadCrossEntropyGradientTest, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(200 + seed);
    const auto h = GaussianMatrix(7, 5, 1.0, rng);
    const auto w = GaussianVector(5, 1.0, rng);
    const int target = 1 + static_cast<int>(seed % 7);
    const auto probs = Softmax(Matvec(h, w));
    const auto analytic = HeadCrossEntropyGradient(h, probs, target);
    const ScalarFunction f = [&](std::span<const double> x) {
      return -std::log(Softmax(Matvec(h, x))[target - 1]);
    };
    const auto numeric = FiniteDiffGrad(f, w, 1e-5);
    std::vector<double> diff(5);
    for (std::size_t i = 0; i < 5; ++i) diff[i] = analytic[i] - numeric[i];
    EXPECT_LE(L2Norm(diff) / std::max({L2Norm(analytic), L2Norm(numeric), 1e-8}), 1e-5);
  }
}

TEST(StubAuxEncoderTest, ShapeAndDeterminism) {
  const StubAuxEncoder enc(12, 5, 7);
  Rng rng(8);
  const auto frames = GaussianMatrix(4, 12, 1.0, rng);
  const auto a = EncodeFrames(enc, frames);
  EXPECT_EQ(a.rows(), 4u);
  EXPECT_EQ(a.cols(), 5u);
  EXPECT_EQ(a, EncodeFrames(StubAuxEncoder(12, 5, 7), frames));
}

TEST(LossTraceTest, CsvHeaderAndRows) {
  std::ostringstream out;
  WriteLossTraceCsv(out, {{1, 2, 3, 4}, {0.5, 0.25, 0.125, 1}});
  const auto s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "step,ce_s,ce_e,kl,total");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

}  // namespace
}  // namespace groundit
