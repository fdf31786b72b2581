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

#include "groundit/mask_codec.h"

#include <gtest/gtest.h>

#include <random>

#include "groundit/errors.h"
#include "test_support.h"

namespace groundit {
namespace {

using testing::OrGrids;
using testing::RandomGrid;

MaskGrid Filled(int w, int h, std::uint8_t v) {
  MaskGrid g(w, h);
  std::fill(g.pixels.begin(), g.pixels.end(), v);
  return g;
}

TEST(RleEncodeTest, AllZeroGrid) {
  EXPECT_EQ(RleEncode(Filled(3, 3, 0)).runs, (std::vector<std::uint32_t>{9}));
}

TEST(RleEncodeTest, AllOneGridStartsWithZeroCount) {
  EXPECT_EQ(RleEncode(Filled(3, 3, 1)).runs, (std::vector<std::uint32_t>{0, 9}));
}

TEST(RleEncodeTest, MixedRowMajor) {
  MaskGrid g(4, 2);
  g.pixels = {0, 1, 1, 0, 0, 0, 1, 1};
  EXPECT_EQ(RleEncode(g).runs, (std::vector<std::uint32_t>{1, 2, 3, 2}));
  EXPECT_EQ(RleEncode(g).area(), 4u);
  EXPECT_DOUBLE_EQ(RleEncode(g).coverage(), 0.5);
}

TEST(RleEncodeTest, RoundTripOnRandomGrids) {
  Rng rng(1);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto grid = RandomGrid(dim(rng), dim(rng), rng);
    const auto mask = RleEncode(grid);
    EXPECT_NO_THROW(ValidateMask(mask));
    ASSERT_EQ(RleDecode(mask), grid);
  }
}

TEST(ValidateMaskTest, RejectsCorruptRuns) {
  EXPECT_THROW(ValidateMask({2, 2, {3}}), CorruptMaskError);
  EXPECT_THROW(ValidateMask({2, 2, {1, 0, 3}}), CorruptMaskError);
  EXPECT_THROW(ValidateMask({2, 2, {}}), CorruptMaskError);
  EXPECT_THROW(RleDecode({2, 2, {5}}), CorruptMaskError);
  EXPECT_NO_THROW(ValidateMask({2, 2, {0, 4}}));
}

TEST(UnionMaskTest, SingleMaskIsCopied) {
  Rng rng(2);
  const auto m = RleEncode(RandomGrid(9, 7, rng));
  EXPECT_EQ(UnionMask({m}), m);
}

TEST(UnionMaskTest, DisjointAreasAdd) {
  MaskGrid a(8, 8), b(8, 8);
  for (int x = 0; x < 3; ++x) a.at(x, 1) = 1;
  for (int y = 4; y < 8; ++y) b.at(6, y) = 1;
  const auto u = UnionMask({RleEncode(a), RleEncode(b)});
  EXPECT_EQ(u.area(), 7u);
}

TEST(UnionMaskTest, MatchesDecodedOr) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = RandomGrid(32, 32, rng);
    const auto b = RandomGrid(32, 32, rng);
    EXPECT_EQ(RleDecode(UnionMask({RleEncode(a), RleEncode(b)})), OrGrids(a, b));
  }
}

TEST(UnionMaskTest, AlgebraicLaws) {
  Rng rng(4);
  std::uniform_int_distribution<int> dim(1, 24);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = dim(rng), h = dim(rng);
    const auto a = RleEncode(RandomGrid(w, h, rng));
    const auto b = RleEncode(RandomGrid(w, h, rng));
    const auto c = RleEncode(RandomGrid(w, h, rng));
    EXPECT_EQ(UnionMask({a, b}), UnionMask({b, a}));
    EXPECT_EQ(UnionMask({UnionMask({a, b}), c}), UnionMask({a, UnionMask({b, c})}));
    EXPECT_EQ(UnionMask({a, a}), a);
  }
}

TEST(UnionMaskTest, RejectsMismatchedOrEmpty) {
  EXPECT_THROW(UnionMask({}), std::invalid_argument);
  EXPECT_THROW(UnionMask({BinaryMask::Empty(2, 2), BinaryMask::Empty(3, 2)}),
               std::invalid_argument);
}

}  // namespace
}  // namespace groundit
