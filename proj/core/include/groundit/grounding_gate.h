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

#ifndef GROUNDIT_GROUNDING_GATE_H_
#define GROUNDIT_GROUNDING_GATE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "groundit/mask_codec.h"
#include "groundit/prompt.h"

namespace groundit {

// Frames are 1-based throughout this module.

// One detector proposal scored against one noun.
struct DetectionRecord {
  int frame = 1;
  std::string noun;
  int proposal = 0;
  double score = 0.0;
  std::optional<BinaryMask> mask;
};

inline constexpr int kNoProposal = -1;

// Best proposal per (noun, frame). Cells without any detection hold score 0
// and kNoProposal.
class ScoreTable {
 public:
  ScoreTable(std::vector<std::string> nouns, int frames);

  int num_nouns() const { return static_cast<int>(nouns_.size()); }
  int num_frames() const { return frames_; }
  const std::vector<std::string>& nouns() const { return nouns_; }

  double best_score(int noun, int frame) const { return score_[Index(noun, frame)]; }
  int best_proposal(int noun, int frame) const { return proposal_[Index(noun, frame)]; }
  void Set(int noun, int frame, double score, int proposal);

 private:
  std::size_t Index(int noun, int frame) const;

  std::vector<std::string> nouns_;
  int frames_;
  std::vector<double> score_;
  std::vector<int> proposal_;
};

struct GateConfig {
  std::vector<double> thresholds;  // one per noun, each in (0, 1]
  int persistence = 3;             // K
  int min_span = 5;                // L
};

// Binary per-frame indicator, index 0 holds frame 1.
using GateSequence = std::vector<std::uint8_t>;

// Inclusive frame interval.
struct FrameSpan {
  int first = 1;
  int last = 1;
  int length() const { return last - first + 1; }
  bool operator==(const FrameSpan&) const = default;
};

// Keeps the max-score record per cell; ties go to the smaller proposal index.
// Throws std::invalid_argument for unknown nouns, frames outside [1, T] or
// scores outside [0, 1].
ScoreTable SelectBestProposals(const std::vector<DetectionRecord>& detections,
                               const NounSet& nouns, int frames);

// g_t = 1 iff every noun's best score reaches its threshold.
GateSequence AndGate(const ScoreTable& table, const GateConfig& config);

// Gamma_t = product of g over [t, t + K - 1]; windows that run past the last
// frame are 0.
GateSequence Persistence(const GateSequence& gate, int k);

// Earliest frame with a set bit.
std::optional<int> StartTime(const GateSequence& persist);

// Longest maximal run of ones with length >= min_span; earliest wins ties.
std::optional<FrameSpan> ExtractSpan(const GateSequence& gate, int min_span);

// Everything the grounding stage decides from a score table.
struct GateResult {
  GateSequence gate;
  GateSequence persist;
  std::optional<int> start;
  std::optional<FrameSpan> span;
};

GateResult RunGate(const ScoreTable& table, const GateConfig& config);

// Per-noun mask sequence from the start frame to the last frame.
struct MaskTrack {
  std::string noun;
  int start = 1;
  std::vector<BinaryMask> masks;  // masks[i] belongs to frame start + i
  std::optional<std::string> diagnostic;  // set when propagation stopped early

  int end() const { return start + static_cast<int>(masks.size()) - 1; }
};

// Carries a mask from one frame to the next. Returning nullopt or throwing
// marks a propagation failure at `frame`.
class MaskPropagator {
 public:
  virtual ~MaskPropagator() = default;
  virtual std::optional<BinaryMask> Propagate(const BinaryMask& previous, int noun_index,
                                              int frame) = 0;
};

// Fallback used when no tracker is available: every frame reuses the seed.
class IdentityPropagator final : public MaskPropagator {
 public:
  std::optional<BinaryMask> Propagate(const BinaryMask& previous, int noun_index,
                                      int frame) override;
};

// Seeds one track per noun at `start` and propagates forward to the last frame
// of the table. A failure at frame t truncates that track at t - 1 and records
// a diagnostic; other tracks are unaffected.
std::vector<MaskTrack> SeedAndPropagate(const ScoreTable& table, int start,
                                        const std::vector<BinaryMask>& seed_masks,
                                        MaskPropagator& propagator);

// M_t for every frame 1..frames. Frames no track covers get an empty mask.
std::vector<BinaryMask> UnionMasksPerFrame(const std::vector<MaskTrack>& tracks,
                                           int frames, int width, int height);

}  // namespace groundit

#endif  // GROUNDIT_GROUNDING_GATE_H_
