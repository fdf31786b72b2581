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

#include "groundit/span_decoder.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "groundit/errors.h"
#include "json.hpp"

namespace groundit {

DenseMatrix VideoRows(const DenseMatrix& hidden, const MixedTokenSequence& seq) {
  if (hidden.rows() != seq.size()) {
    throw std::invalid_argument("VideoRows: hidden states do not match the sequence");
  }
  const auto positions = seq.VideoPositions();
  DenseMatrix out(positions.size(), hidden.cols());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto src = hidden.row(positions[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

HeadDistributions ComputeHeadDistributions(const DenseMatrix& video_hidden,
                                           const HeadParams& heads) {
  if (video_hidden.rows() == 0) {
    throw std::invalid_argument("ComputeHeadDistributions: no video positions");
  }
  if (heads.w_start.size() != video_hidden.cols() ||
      heads.w_end.size() != video_hidden.cols()) {
    throw std::invalid_argument("ComputeHeadDistributions: head width mismatch");
  }
  return {Softmax(Matvec(video_hidden, heads.w_start)),
          Softmax(Matvec(video_hidden, heads.w_end))};
}

SpanPrediction DecodeSpan(const ProbVector& p_start, const ProbVector& p_end) {
  if (p_start.size() != p_end.size()) {
    throw std::invalid_argument("DecodeSpan: start/end lengths differ");
  }
  if (p_start.size() == 0) throw std::invalid_argument("DecodeSpan: empty distributions");
  std::size_t best_prefix = 0;
  SpanPrediction best{0, 0, -1.0};
  for (std::size_t e = 0; e < p_end.size(); ++e) {
    if (p_start[e] > p_start[best_prefix]) best_prefix = e;
    const double joint = p_start[best_prefix] * p_end[e];
    const int s = static_cast<int>(best_prefix) + 1;
    if (joint > best.joint || (joint == best.joint && s < best.start)) {
      best = {s, static_cast<int>(e) + 1, joint};
    }
  }
  return best;
}

SecondsInterval SpanToSeconds(const SpanPrediction& span, int frames, double duration_s) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("SpanToSeconds: duration must be > 0");
  if (frames < 1) throw std::invalid_argument("SpanToSeconds: frames must be >= 1");
  const double frame_s = duration_s / frames;
  const double start_center = (span.start - 0.5) * frame_s;
  const double end_center = (span.end - 0.5) * frame_s;
  return {std::clamp(start_center - 0.5 * frame_s, 0.0, duration_s),
          std::clamp(end_center + 0.5 * frame_s, 0.0, duration_s)};
}

void WritePredictionJsonl(std::ostream& out, const std::vector<PredictionRecord>& preds) {
  for (const auto& p : preds) {
    nlohmann::json obj{{"id", p.id},
                       {"s", p.span.start},
                       {"e", p.span.end},
                       {"start_s", p.seconds.start_s},
                       {"end_s", p.seconds.end_s},
                       {"joint", p.span.joint}};
    out << obj.dump() << '\n';
  }
}

std::vector<PredictionRecord> ReadPredictionJsonl(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(text);
      PredictionRecord p;
      p.id = obj.at("id").get<std::string>();
      p.seconds.start_s = obj.at("start_s").get<double>();
      p.seconds.end_s = obj.at("end_s").get<double>();
      p.span.start = obj.value("s", 0);
      p.span.end = obj.value("e", 0);
      p.span.joint = obj.value("joint", 0.0);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("prediction record: ") + e.what(), line);
    }
  }
  return out;
}

}  // namespace groundit
