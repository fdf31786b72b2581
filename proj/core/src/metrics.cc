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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "groundit/errors.h"
#include "json.hpp"

namespace groundit {

bool Interval::Valid() const {
  return std::isfinite(start_s) && std::isfinite(end_s) && start_s >= 0.0 &&
         start_s <= end_s;
}

namespace {

double Overlap(const Interval& a, const Interval& b) {
  return std::max(0.0, std::min(a.end_s, b.end_s) - std::max(a.start_s, b.start_s));
}

double SortedMean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double IntervalIou(const Interval& a, const Interval& b) {
  const double inter = Overlap(a, b);
  const double union_len = a.length() + b.length() - inter;
  if (union_len <= 0.0) return 0.0;
  return inter / union_len;
}

double IntervalIop(const Interval& pred, const Interval& gt) {
  if (pred.length() <= 0.0) {
    return pred.start_s >= gt.start_s && pred.end_s <= gt.end_s ? 1.0 : 0.0;
  }
  return Overlap(pred, gt) / pred.length();
}

MetricReport Aggregate(const std::vector<EvalRecord>& records,
                       const std::vector<double>& thresholds) {
  if (records.empty()) throw std::invalid_argument("Aggregate: no records");
  const std::size_t with_answer = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [](const EvalRecord& r) { return r.answer_correct.has_value(); }));
  if (with_answer != 0 && with_answer != records.size()) {
    throw std::invalid_argument("Aggregate: answer_correct present on only some records");
  }
  std::vector<double> ious;
  std::vector<double> iops;
  ious.reserve(records.size());
  iops.reserve(records.size());
  std::size_t gqa_hits = 0;
  for (const auto& r : records) {
    if (!r.pred.Valid() || !r.gt.Valid()) {
      throw std::invalid_argument("Aggregate: invalid interval in record '" + r.id + "'");
    }
    ious.push_back(IntervalIou(r.pred, r.gt));
    iops.push_back(IntervalIop(r.pred, r.gt));
    if (r.answer_correct.value_or(false) && iops.back() >= kGqaIopThreshold) ++gqa_hits;
  }
  const double n = static_cast<double>(records.size());
  MetricReport report;
  report.count = records.size();
  for (double theta : thresholds) {
    const auto hits = std::count_if(ious.begin(), ious.end(),
                                    [theta](double v) { return v >= theta; });
    report.recall_at.emplace_back(theta, 100.0 * static_cast<double>(hits) / n);
  }
  report.miou = 100.0 * SortedMean(ious);
  report.miop = 100.0 * SortedMean(iops);
  if (with_answer != 0) report.acc_gqa = 100.0 * static_cast<double>(gqa_hits) / n;
  return report;
}

double RoundPercent(double value) { return std::floor(value * 10.0 + 0.5) / 10.0; }

namespace {

std::string ThresholdLabel(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "R@%g", theta);
  return buf;
}

}  // namespace

std::string ReportJson(const MetricReport& report) {
  nlohmann::ordered_json obj;
  obj["count"] = report.count;
  for (const auto& [theta, value] : report.recall_at) {
    obj[ThresholdLabel(theta)] = RoundPercent(value);
  }
  obj["mIoU"] = RoundPercent(report.miou);
  obj["mIoP"] = RoundPercent(report.miop);
  obj["Acc@GQA"] = report.acc_gqa ? nlohmann::ordered_json(RoundPercent(*report.acc_gqa))
                                  : nlohmann::ordered_json(nullptr);
  return obj.dump();
}

std::string ReportTable(const MetricReport& report) {
  std::vector<std::pair<std::string, std::optional<double>>> cols;
  for (const auto& [theta, value] : report.recall_at) cols.emplace_back(ThresholdLabel(theta), value);
  cols.emplace_back("mIoU", report.miou);
  cols.emplace_back("mIoP", report.miop);
  cols.emplace_back("Acc@GQA", report.acc_gqa);
  std::ostringstream header;
  std::ostringstream row;
  for (const auto& [name, value] : cols) {
    char cell[32];
    if (value) {
      std::snprintf(cell, sizeof(cell), "%.1f", RoundPercent(*value));
    } else {
      std::snprintf(cell, sizeof(cell), "-");
    }
    const int width = static_cast<int>(std::max<std::size_t>(name.size(), 6)) + 2;
    char hbuf[64];
    char rbuf[64];
    std::snprintf(hbuf, sizeof(hbuf), "%*s", width, name.c_str());
    std::snprintf(rbuf, sizeof(rbuf), "%*s", width, cell);
    header << hbuf;
    row << rbuf;
  }
  return header.str() + "\n" + row.str() + "\n";
}

std::vector<GroundTruthRecord> ReadGroundTruthJsonl(std::istream& in) {
  std::vector<GroundTruthRecord> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    GroundTruthRecord r;
    try {
      const auto obj = nlohmann::json::parse(text);
      r.id = obj.at("id").get<std::string>();
      r.interval = {obj.at("start_s").get<double>(), obj.at("end_s").get<double>()};
      if (obj.contains("answer_correct") && !obj.at("answer_correct").is_null()) {
        r.answer_correct = obj.at("answer_correct").get<bool>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("ground-truth record: ") + e.what(), line);
    }
    if (!r.interval.Valid()) throw SchemaError("ground-truth interval is invalid", line);
    out.push_back(std::move(r));
  }
  return out;
}

JoinResult JoinById(const std::vector<std::pair<std::string, Interval>>& predictions,
                    const std::vector<GroundTruthRecord>& ground_truth) {
  std::map<std::string, const GroundTruthRecord*> gt_by_id;
  for (const auto& g : ground_truth) gt_by_id.emplace(g.id, &g);
  JoinResult result;
  std::set<std::string> unmatched;
  std::set<std::string> seen;
  for (const auto& [id, pred] : predictions) {
    const auto it = gt_by_id.find(id);
    if (it == gt_by_id.end()) {
      unmatched.insert(id);
      continue;
    }
    seen.insert(id);
    result.records.push_back({id, pred, it->second->interval, it->second->answer_correct});
  }
  for (const auto& g : ground_truth) {
    if (!seen.count(g.id)) unmatched.insert(g.id);
  }
  result.unmatched_ids.assign(unmatched.begin(), unmatched.end());
  return result;
}

}  // namespace groundit
