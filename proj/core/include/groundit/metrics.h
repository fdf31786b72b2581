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

#ifndef GROUNDIT_METRICS_H_
#define GROUNDIT_METRICS_H_

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace groundit {

// Time interval in seconds, 0 <= start_s <= end_s.
struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  bool Valid() const;
};

// |a & b| / |a | b|; 0 when the union is empty.
double IntervalIou(const Interval& a, const Interval& b);

// |pred & gt| / |pred|. A zero-length prediction scores 1 when it lies inside
// gt and 0 otherwise.
double IntervalIop(const Interval& pred, const Interval& gt);

struct EvalRecord {
  std::string id;
  Interval pred;
  Interval gt;
  std::optional<bool> answer_correct;
};

inline const std::vector<double> kDefaultIouThresholds = {0.3, 0.5, 0.7};
inline constexpr double kGqaIopThreshold = 0.5;

// All values are percentages in [0, 100].
struct MetricReport {
  std::size_t count = 0;
  std::vector<std::pair<double, double>> recall_at;  // (threshold, R@threshold)
  double miou = 0.0;
  double miop = 0.0;
  // Present when every record carries answer_correct.
  std::optional<double> acc_gqa;
};

// R@theta is the share of records with IoU >= theta; mIoU and mIoP are means;
// Acc@GQA counts records answered correctly with IoP >= 0.5. Per-record values
// are summed in sorted order, so the report does not depend on record order.
// Throws std::invalid_argument for an empty record list, invalid intervals or
// partially present answer flags.
MetricReport Aggregate(const std::vector<EvalRecord>& records,
                       const std::vector<double>& thresholds = kDefaultIouThresholds);

// One decimal, halves rounded up.
double RoundPercent(double value);

std::string ReportJson(const MetricReport& report);
std::string ReportTable(const MetricReport& report);

struct GroundTruthRecord {
  std::string id;
  Interval interval;
  std::optional<bool> answer_correct;
};

// {"id", "start_s", "end_s", "answer_correct"?} per line. Throws SchemaError.
std::vector<GroundTruthRecord> ReadGroundTruthJsonl(std::istream& in);

struct JoinResult {
  std::vector<EvalRecord> records;
  std::vector<std::string> unmatched_ids;  // sorted, from either side
};

JoinResult JoinById(const std::vector<std::pair<std::string, Interval>>& predictions,
                    const std::vector<GroundTruthRecord>& ground_truth);

}  // namespace groundit

#endif  // GROUNDIT_METRICS_H_
