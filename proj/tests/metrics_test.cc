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

#include "groundit/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {
namespace {

TEST(IntervalIouTest, Basics) {
  EXPECT_EQ(IntervalIou({1, 5}, {1, 5}), 1.0);
  EXPECT_EQ(IntervalIou({0, 1}, {2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(IntervalIou({2, 6}, {4, 8}), 1.0 / 3.0);
  EXPECT_EQ(IntervalIou({2, 2}, {2, 2}), 0.0);
}

TEST(IntervalIopTest, Basics) {
  EXPECT_EQ(IntervalIop({3, 4}, {2, 10}), 1.0);
  EXPECT_EQ(IntervalIop({0, 1}, {2, 10}), 0.0);
  EXPECT_DOUBLE_EQ(IntervalIop({0, 4}, {2, 10}), 0.5);
  EXPECT_EQ(IntervalIop({3, 3}, {2, 10}), 1.0);
  EXPECT_EQ(IntervalIop({11, 11}, {2, 10}), 0.0);
}

Interval RandomInterval(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 30.0);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  return {a, b};
}

TEST(IntervalMetricsTest, Properties) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = RandomInterval(rng), b = RandomInterval(rng);
    const double iou = IntervalIou(a, b);
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    EXPECT_EQ(iou, IntervalIou(b, a));
    if (a.length() > 0) {
      EXPECT_DOUBLE_EQ(IntervalIou(a, a), 1.0);
      // Equal when b lies inside a; the union is then rounded through la + lb - inter.
      EXPECT_GE(IntervalIop(a, b), iou * (1.0 - 1e-15));
    }
  }
}

EvalRecord Rec(std::string id, Interval pred, Interval gt, std::optional<bool> ok = {}) {
  return {std::move(id), pred, gt, ok};
}

TEST(AggregateTest, PerfectRecord) {
  const auto r = Aggregate({Rec("a", {1, 4}, {1, 4})});
  for (const auto& [theta, value] : r.recall_at) EXPECT_EQ(value, 100.0);
  EXPECT_EQ(r.miou, 100.0);
  EXPECT_FALSE(r.acc_gqa.has_value());
}

TEST(AggregateTest, AccGqaCountsCorrectAnswersWithEnoughOverlap) {
  // IoP 0.6 and 0.4 respectively.
  const auto r = Aggregate({Rec("a", {0, 10}, {4, 20}, true), Rec("b", {0, 10}, {6, 20}, true)});
  ASSERT_TRUE(r.acc_gqa.has_value());
  EXPECT_EQ(*r.acc_gqa, 50.0);
}

TEST(AggregateTest, HandComputedThreeRecordFixture) {
  const auto r = Aggregate({Rec("a", {0, 10}, {0, 10}), Rec("b", {2, 6}, {4, 8}),
                            Rec("c", {0, 4}, {2, 10})});
  ASSERT_EQ(r.recall_at.size(), 3u);
  EXPECT_NEAR(r.recall_at[0].second, 200.0 / 3, 1e-12);
  EXPECT_NEAR(r.recall_at[1].second, 100.0 / 3, 1e-12);
  EXPECT_NEAR(r.recall_at[2].second, 100.0 / 3, 1e-12);
  EXPECT_NEAR(r.miou, 100.0 * (1.0 + 1.0 / 3 + 0.2) / 3, 1e-12);
  EXPECT_NEAR(r.miop, 100.0 * 2.0 / 3, 1e-12);
  EXPECT_EQ(ReportJson(r),
            "{\"count\":3,\"R@0.3\":66.7,\"R@0.5\":33.3,\"R@0.7\":33.3,\"mIoU\":51.1,"
            "\"mIoP\":66.7,\"Acc@GQA\":null}");
}

std::vector<EvalRecord> RandomRecords(int n, Rng& rng, bool answers) {
  std::bernoulli_distribution coin(0.6);
  std::vector<EvalRecord> out;
  for (int i = 0; i < n; ++i) {
    const auto gt = RandomInterval(rng);
    auto pred = RandomInterval(rng);
    if (i % 3 == 0) pred = {gt.start_s + 0.5, gt.end_s + 0.5};
    out.push_back(Rec("r" + std::to_string(i), pred, gt,
                      answers ? std::optional<bool>(coin(rng)) : std::nullopt));
  }
  return out;
}

TEST(AggregateTest, MatchesResummationOracle) {
  Rng rng(2);
  const auto records = RandomRecords(200, rng, true);
  const std::vector<double> thetas = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto r = Aggregate(records, thetas);
  long double iou_sum = 0, iop_sum = 0;
  int acc = 0;
  std::vector<int> hits(thetas.size(), 0);
  for (const auto& rec : records) {
    const double iou = IntervalIou(rec.pred, rec.gt);
    const double iop = IntervalIop(rec.pred, rec.gt);
    iou_sum += iou;
    iop_sum += iop;
    if (*rec.answer_correct && iop >= 0.5) ++acc;
    for (std::size_t k = 0; k < thetas.size(); ++k) hits[k] += iou >= thetas[k];
  }
  EXPECT_NEAR(r.miou, static_cast<double>(100 * iou_sum / 200), 1e-10);
  EXPECT_NEAR(r.miop, static_cast<double>(100 * iop_sum / 200), 1e-10);
  EXPECT_NEAR(*r.acc_gqa, 100.0 * acc / 200, 1e-12);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    EXPECT_NEAR(r.recall_at[k].second, 100.0 * hits[k] / 200, 1e-12);
    if (k > 0) {
      EXPECT_LE(r.recall_at[k].second, r.recall_at[k - 1].second);
    }
  }
}

TEST(AggregateTest, PermutationInvariant) {
  Rng rng(3);
  auto records = RandomRecords(200, rng, false);
  const auto base = ReportJson(Aggregate(records));
  const auto base_raw = Aggregate(records);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto r = Aggregate(records);
    EXPECT_EQ(ReportJson(r), base);
    EXPECT_EQ(r.miou, base_raw.miou);
    EXPECT_EQ(r.miop, base_raw.miop);
  }
}

TEST(AggregateTest, RejectsBadInput) {
  EXPECT_THROW(Aggregate({}), std::invalid_argument);
  EXPECT_THROW(Aggregate({Rec("a", {5, 1}, {0, 1})}), std::invalid_argument);
  EXPECT_THROW(Aggregate({Rec("a", {0, 1}, {0, 1}, true), Rec("b", {0, 1}, {0, 1})}),
               std::invalid_argument);
}

TEST(RoundPercentTest, HalvesRoundUp) {
  EXPECT_EQ(RoundPercent(66.66666), 66.7);
  EXPECT_EQ(RoundPercent(33.33333), 33.3);
  EXPECT_EQ(RoundPercent(12.25), 12.3);
  EXPECT_EQ(RoundPercent(100.0), 100.0);
}

TEST(ReportTableTest, HeaderAndValues) {
  const auto table = ReportTable(Aggregate({Rec("a", {1, 4}, {1, 4})}));
  EXPECT_NE(table.find("R@0.3"), std::string::npos);
  EXPECT_NE(table.find("100.0"), std::string::npos);
  EXPECT_NE(table.find("Acc@GQA"), std::string::npos);
}

TEST(JoinByIdTest, ReportsUnmatchedFromBothSides) {
  const std::vector<GroundTruthRecord> gt = {{"a", {0, 1}, {}}, {"c", {0, 2}, {}}};
  const auto joined = JoinById({{"a", {0, 1}}, {"b", {1, 2}}}, gt);
  ASSERT_EQ(joined.records.size(), 1u);
  EXPECT_EQ(joined.unmatched_ids, (std::vector<std::string>{"b", "c"}));
}

TEST(GroundTruthJsonlTest, ParsesOptionalAnswerFlag) {
  std::istringstream in(
      "{\"id\": \"a\", \"start_s\": 1.5, \"end_s\": 3}\n"
      "{\"id\": \"b\", \"start_s\": 0, \"end_s\": 2, \"answer_correct\": true}\n");
  const auto gt = ReadGroundTruthJsonl(in);
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_EQ(gt[0].interval.start_s, 1.5);
  EXPECT_FALSE(gt[0].answer_correct.has_value());
  EXPECT_EQ(gt[1].answer_correct, true);
  std::istringstream bad("{\"id\": \"a\", \"start_s\": \"x\", \"end_s\": 3}\n");
  EXPECT_THROW(ReadGroundTruthJsonl(bad), SchemaError);
}

}  // namespace
}  // namespace groundit
