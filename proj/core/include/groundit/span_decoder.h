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

#ifndef GROUNDIT_SPAN_DECODER_H_
#define GROUNDIT_SPAN_DECODER_H_

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "groundit/numerics.h"
#include "groundit/token_fusion.h"

namespace groundit {

struct HeadParams {
  std::vector<double> w_start;
  std::vector<double> w_end;
};

// Frames are 1-based.
struct SpanPrediction {
  int start = 1;
  int end = 1;
  double joint = 0.0;  // p_s(start) * p_e(end)
  bool operator==(const SpanPrediction&) const = default;
};

struct HeadDistributions {
  ProbVector start;
  ProbVector end;
};

// Rows of `hidden` at the VIDEO positions of `seq`, in frame order.
DenseMatrix VideoRows(const DenseMatrix& hidden, const MixedTokenSequence& seq);

// p_s(t) = softmax_t(w_s . h_t), p_e likewise, over the rows of
// `video_hidden`. Throws std::invalid_argument for zero rows or a width
// mismatch.
HeadDistributions ComputeHeadDistributions(const DenseMatrix& video_hidden,
                                           const HeadParams& heads);

// argmax over start <= end of p_s(start) p_e(end), in one pass that carries the
// running best start. Ties go to the smallest start, then the smallest end.
SpanPrediction DecodeSpan(const ProbVector& p_start, const ProbVector& p_end);

struct SecondsInterval {
  double start_s = 0.0;
  double end_s = 0.0;
};

// Frame t covers [(t - 1), t] * duration / frames; the interval spans from the
// start frame's left edge to the end frame's right edge, clipped to the video.
SecondsInterval SpanToSeconds(const SpanPrediction& span, int frames, double duration_s);

struct PredictionRecord {
  std::string id;
  SpanPrediction span;
  SecondsInterval seconds;
};

// {"id", "s", "e", "start_s", "end_s", "joint"} per line.
void WritePredictionJsonl(std::ostream& out, const std::vector<PredictionRecord>& preds);
// Throws SchemaError with the offending line.
std::vector<PredictionRecord> ReadPredictionJsonl(std::istream& in);

}  // namespace groundit

#endif  // GROUNDIT_SPAN_DECODER_H_
