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

#include "groundit/grounding_gate.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace groundit {

ScoreTable::ScoreTable(std::vector<std::string> nouns, int frames)
    : nouns_(std::move(nouns)), frames_(frames) {
  if (frames < 0) throw std::invalid_argument("ScoreTable: negative frame count");
  const std::size_t cells = nouns_.size() * static_cast<std::size_t>(frames);
  score_.assign(cells, 0.0);
  proposal_.assign(cells, kNoProposal);
}

std::size_t ScoreTable::Index(int noun, int frame) const {
  if (noun < 0 || noun >= num_nouns() || frame < 1 || frame > frames_) {
    throw std::out_of_range("ScoreTable: cell (" + std::to_string(noun) + ", " +
                            std::to_string(frame) + ") out of range");
  }
  return static_cast<std::size_t>(noun) * frames_ + (frame - 1);
}

void ScoreTable::Set(int noun, int frame, double score, int proposal) {
  const std::size_t i = Index(noun, frame);
  score_[i] = score;
  proposal_[i] = proposal;
}

ScoreTable SelectBestProposals(const std::vector<DetectionRecord>& detections,
                               const NounSet& nouns, int frames) {
  ScoreTable table(nouns.nouns, frames);
  for (const auto& d : detections) {
    const auto it = std::find(nouns.nouns.begin(), nouns.nouns.end(), d.noun);
    if (it == nouns.nouns.end()) {
      throw std::invalid_argument("detection references unknown noun '" + d.noun + "'");
    }
    if (d.frame < 1 || d.frame > frames) {
      throw std::invalid_argument("detection frame " + std::to_string(d.frame) +
                                  " outside [1, " + std::to_string(frames) + "]");
    }
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw std::invalid_argument("detection score must lie in [0, 1]");
    }
    if (d.proposal < 0) throw std::invalid_argument("negative proposal index");
    const int i = static_cast<int>(it - nouns.nouns.begin());
    const double best = table.best_score(i, d.frame);
    const int best_k = table.best_proposal(i, d.frame);
    if (best_k == kNoProposal || d.score > best ||
        (d.score == best && d.proposal < best_k)) {
      table.Set(i, d.frame, d.score, d.proposal);
    }
  }
  return table;
}

GateSequence AndGate(const ScoreTable& table, const GateConfig& config) {
  if (static_cast<int>(config.thresholds.size()) != table.num_nouns()) {
    throw std::invalid_argument("AndGate: " + std::to_string(config.thresholds.size()) +
                                " thresholds for " + std::to_string(table.num_nouns()) +
                                " nouns");
  }
  for (double tau : config.thresholds) {
    if (!(tau > 0.0 && tau <= 1.0)) {
      throw std::invalid_argument("AndGate: thresholds must lie in (0, 1]");
    }
  }
  GateSequence gate(table.num_frames(), 0);
  for (int t = 1; t <= table.num_frames(); ++t) {
    bool all = true;
    for (int i = 0; i < table.num_nouns() && all; ++i) {
      all = table.best_score(i, t) >= config.thresholds[i];
    }
    gate[t - 1] = all ? 1 : 0;
  }
  return gate;
}

GateSequence Persistence(const GateSequence& gate, int k) {
  if (k < 1) throw std::invalid_argument("Persistence: K must be >= 1");
  const int n = static_cast<int>(gate.size());
  GateSequence out(gate.size(), 0);
  // Length of the run of ones starting at each frame, scanned backwards.
  int run = 0;
  for (int t = n - 1; t >= 0; --t) {
    run = gate[t] ? run + 1 : 0;
    out[t] = run >= k ? 1 : 0;
  }
  return out;
}

std::optional<int> StartTime(const GateSequence& persist) {
  const auto it = std::find(persist.begin(), persist.end(), 1);
  if (it == persist.end()) return std::nullopt;
  return static_cast<int>(it - persist.begin()) + 1;
}

std::optional<FrameSpan> ExtractSpan(const GateSequence& gate, int min_span) {
  if (min_span < 1) throw std::invalid_argument("ExtractSpan: L must be >= 1");
  std::optional<FrameSpan> best;
  const int n = static_cast<int>(gate.size());
  int t = 0;
  while (t < n) {
    if (!gate[t]) {
      ++t;
      continue;
    }
    int end = t;
    while (end + 1 < n && gate[end + 1]) ++end;
    const FrameSpan run{t + 1, end + 1};
    if (run.length() >= min_span && (!best || run.length() > best->length())) best = run;
    t = end + 1;
  }
  return best;
}

GateResult RunGate(const ScoreTable& table, const GateConfig& config) {
  GateResult r;
  r.gate = AndGate(table, config);
  r.persist = Persistence(r.gate, config.persistence);
  r.start = StartTime(r.persist);
  r.span = ExtractSpan(r.gate, config.min_span);
  return r;
}

std::optional<BinaryMask> IdentityPropagator::Propagate(const BinaryMask& previous,
                                                        int /*noun_index*/,
                                                        int /*frame*/) {
  return previous;
}

std::vector<MaskTrack> SeedAndPropagate(const ScoreTable& table, int start,
                                        const std::vector<BinaryMask>& seed_masks,
                                        MaskPropagator& propagator) {
  if (static_cast<int>(seed_masks.size()) != table.num_nouns()) {
    throw std::invalid_argument("SeedAndPropagate: expected one seed mask per noun");
  }
  if (start < 1 || start > table.num_frames()) {
    throw std::invalid_argument("SeedAndPropagate: start frame out of range");
  }
  for (const auto& m : seed_masks) {
    ValidateMask(m);
    if (m.width != seed_masks.front().width || m.height != seed_masks.front().height) {
      throw std::invalid_argument("SeedAndPropagate: seed masks differ in size");
    }
  }
  std::vector<MaskTrack> tracks;
  tracks.reserve(seed_masks.size());
  for (int i = 0; i < table.num_nouns(); ++i) {
    MaskTrack track{table.nouns()[i], start, {seed_masks[i]}, std::nullopt};
    for (int t = start + 1; t <= table.num_frames(); ++t) {
      std::optional<BinaryMask> next;
      std::string reason;
      try {
        next = propagator.Propagate(track.masks.back(), i, t);
      } catch (const std::exception& e) {
        reason = e.what();
      }
      if (next) {
        try {
          ValidateMask(*next);
          if (next->width != track.masks.back().width ||
              next->height != track.masks.back().height) {
            reason = "propagated mask changed size";
            next.reset();
          }
        } catch (const std::exception& e) {
          reason = e.what();
          next.reset();
        }
      }
      if (!next) {
        track.diagnostic = "propagation of '" + track.noun + "' failed at frame " +
                           std::to_string(t) + (reason.empty() ? "" : ": " + reason);
        break;
      }
      track.masks.push_back(std::move(*next));
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<BinaryMask> UnionMasksPerFrame(const std::vector<MaskTrack>& tracks,
                                           int frames, int width, int height) {
  std::vector<BinaryMask> out;
  out.reserve(frames);
  for (int t = 1; t <= frames; ++t) {
    std::vector<BinaryMask> present{BinaryMask::Empty(width, height)};
    for (const auto& track : tracks) {
      if (t >= track.start && t <= track.end()) present.push_back(track.masks[t - track.start]);
    }
    out.push_back(UnionMask(present));
  }
  return out;
}

}  // namespace groundit
