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

#include "groundit/backbone_adapter.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {
namespace {

LoraAdapter RandomAdapter(std::size_t d_out, std::size_t d_in, std::size_t r, double alpha,
                          Rng& rng) {
  return {GaussianMatrix(d_out, r, 1.0, rng), GaussianMatrix(r, d_in, 1.0, rng), alpha};
}

TEST(ApplyLoraTest, ZeroAIsFrozenWeight) {
  Rng rng(1);
  const auto w0 = GaussianMatrix(6, 5, 1.0, rng);
  auto adapter = LoraAdapter::Zero(6, 5, 2, 4.0);
  adapter.b = GaussianMatrix(2, 5, 1.0, rng);
  const auto x = GaussianVector(5, 1.0, rng);
  EXPECT_EQ(ApplyLora(w0, adapter, x), Matvec(w0, x));
}

TEST(ApplyLoraTest, HandWorkedRankOne) {
  const LoraAdapter adapter{DenseMatrix::FromRows({{1.0}, {0.0}}),
                            DenseMatrix::FromRows({{0.0, 1.0}}), 1.0};
  const std::vector<double> x = {0.0, 1.0};
  EXPECT_EQ(ApplyLora(DenseMatrix::Identity(2), adapter, x), (std::vector<double>{1.0, 1.0}));
}

TEST(ApplyLoraTest, MatchesExplicitMerge) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w0 = GaussianMatrix(8, 8, 1.0, rng);
    const auto adapter = RandomAdapter(8, 8, 2, 3.0, rng);
    const auto x = GaussianVector(8, 1.0, rng);
    const auto y = ApplyLora(w0, adapter, x);
    for (int i = 0; i < 8; ++i) {
      long double acc = 0;
      for (int j = 0; j < 8; ++j) {
        long double ab = 0;
        for (int k = 0; k < 2; ++k) ab += static_cast<long double>(adapter.a(i, k)) * adapter.b(k, j);
        acc += (w0(i, j) + 1.5L * ab) * x[j];
      }
      EXPECT_NEAR(y[i], static_cast<double>(acc), 1e-12);
    }
  }
}

TEST(MergeLoraTest, ZeroAIsBitEqual) {
  Rng rng(3);
  const auto w0 = GaussianMatrix(4, 6, 1.0, rng);
  EXPECT_EQ(MergeLora(w0, LoraAdapter::Zero(4, 6, 3, 8.0)), w0);
}

TEST(MergeLoraTest, FullRankSlicesRecoverUpdate) {
  Rng rng(4);
  const auto w0 = GaussianMatrix(3, 3, 1.0, rng);
  const auto u = GaussianMatrix(3, 3, 1.0, rng);
  // A = U, B = I, so A B = U exactly.
  const LoraAdapter adapter{u, DenseMatrix::Identity(3), 6.0};
  const auto merged = MergeLora(w0, adapter);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(merged(i, j), w0(i, j) + 2.0 * u(i, j), 1e-15);
  }
}

TEST(MergeLoraTest, MergedAndUnmergedForwardAgree) {
  Rng rng(5);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d_out = dim(rng), d_in = dim(rng);
    std::uniform_int_distribution<std::size_t> rank(1, std::min(d_out, d_in));
    const auto w0 = GaussianMatrix(d_out, d_in, 1.0, rng);
    const auto adapter = RandomAdapter(d_out, d_in, rank(rng), 16.0, rng);
    const auto x = GaussianVector(d_in, 1.0, rng);
    const auto merged = Matvec(MergeLora(w0, adapter), x);
    const auto unmerged = ApplyLora(w0, adapter, x);
    for (std::size_t i = 0; i < d_out; ++i) EXPECT_NEAR(merged[i], unmerged[i], 1e-9);
  }
}

TEST(LoraAdapterTest, ParameterCountAndValidation) {
  const auto a = LoraAdapter::Zero(128, 96, 64, 128.0);
  EXPECT_EQ(a.ParameterCount(), 64u * (128u + 96u));
  EXPECT_EQ(a.scale(), 2.0);
  EXPECT_NO_THROW(a.Validate(128, 96));
  EXPECT_THROW(a.Validate(96, 128), std::invalid_argument);
  EXPECT_THROW(LoraAdapter::Zero(4, 4, 5, 1.0).Validate(4, 4), std::invalid_argument);
  EXPECT_EQ(kDefaultLoraRank, 64u);
  EXPECT_EQ(kDefaultLoraAlpha, 128.0);
}

TEST(ForwardBackboneTest, SingleTokenHasNoMixing) {
  const auto stub = BackboneStub::Seeded(4, 9);
  Rng rng(10);
  const auto x = GaussianVector(4, 1.0, rng);
  const auto h = ForwardBackbone(DenseMatrix(1, 4, x), stub);
  auto pre = Matvec(stub.w1, x);
  for (int i = 0; i < 4; ++i) pre[i] = std::tanh(pre[i] + stub.b1[i]);
  const auto post = Matvec(stub.w2, pre);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(h(0, i), x[i] + post[i] + stub.b2[i], 1e-15);
}

TEST(ForwardBackboneTest, PrefixMeanMixing) {
  const auto stub = BackboneStub::Seeded(3, 11);
  Rng rng(12);
  const auto x = GaussianMatrix(3, 3, 1.0, rng);
  const auto h = ForwardBackbone(x, stub);
  const auto last_alone = ForwardBackbone(DenseMatrix(1, 3, {x(2, 0), x(2, 1), x(2, 2)}), stub);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(h(2, i), last_alone(0, i) + 0.5 * (x(0, i) + x(1, i)), 1e-14);
  }
}

TEST(ForwardBackboneTest, ZeroAdaptersMatchNoAdaptersBitExactly) {
  const auto stub = BackboneStub::Seeded(6, 13);
  Rng rng(14);
  const auto x = GaussianMatrix(10, 6, 1.0, rng);
  BackboneAdapters adapters;
  for (auto& slot : adapters) {
    auto a = LoraAdapter::Zero(6, 6, 2, 4.0);
    a.b = GaussianMatrix(2, 6, 1.0, rng);
    slot = a;
  }
  EXPECT_EQ(ForwardBackbone(x, stub, adapters), ForwardBackbone(x, stub));
}

TEST(ForwardBackboneTest, CausalUnderPerturbation) {
  const auto stub = BackboneStub::Seeded(5, 15);
  Rng rng(16);
  const auto x = GaussianMatrix(16, 5, 1.0, rng);
  BackboneAdapters adapters;
  adapters[kFinalLayer] = RandomAdapter(5, 5, 2, 4.0, rng);
  const auto base = ForwardBackbone(x, stub, adapters);
  for (std::size_t t = 0; t < 16; ++t) {
    auto y = x;
    y(t, 0) += 0.5;
    y(t, 3) -= 0.25;
    const auto h = ForwardBackbone(y, stub, adapters);
    for (std::size_t u = 0; u < 16; ++u) {
      const bool same = std::equal(h.row(u).begin(), h.row(u).end(), base.row(u).begin());
      if (u < t) {
        EXPECT_TRUE(same) << "token " << u << " changed after perturbing " << t;
      } else {
        EXPECT_FALSE(same) << "token " << u << " ignored a change at " << t;
      }
    }
  }
}

TEST(ForwardBackboneTest, RejectsWidthMismatch) {
  const auto stub = BackboneStub::Seeded(4, 1);
  EXPECT_THROW(ForwardBackbone(DenseMatrix(2, 3), stub), std::invalid_argument);
}

TEST(AdapterCheckpointTest, RoundTrip) {
  Rng rng(17);
  BackboneAdapters adapters;
  adapters[kFinalLayer] = RandomAdapter(6, 6, 3, 12.0, rng);
  std::stringstream buf;
  WriteAdapterCheckpoint(buf, adapters);
  const auto back = ReadAdapterCheckpoint(buf);
  EXPECT_FALSE(back[kFirstLayer].has_value());
  ASSERT_TRUE(back[kFinalLayer].has_value());
  EXPECT_EQ(back[kFinalLayer]->a, adapters[kFinalLayer]->a);
  EXPECT_EQ(back[kFinalLayer]->b, adapters[kFinalLayer]->b);
  EXPECT_EQ(back[kFinalLayer]->alpha, 12.0);
}

TEST(AdapterCheckpointTest, TruncatedInputThrows) {
  Rng rng(18);
  BackboneAdapters adapters;
  adapters[kFirstLayer] = RandomAdapter(4, 4, 2, 1.0, rng);
  std::stringstream buf;
  WriteAdapterCheckpoint(buf, adapters);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() / 2);
  std::istringstream in(bytes);
  EXPECT_THROW(ReadAdapterCheckpoint(in), SchemaError);
}

}  // namespace
}  // namespace groundit
