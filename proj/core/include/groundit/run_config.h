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

#ifndef GROUNDIT_RUN_CONFIG_H_
#define GROUNDIT_RUN_CONFIG_H_

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "groundit/dtl_encoder.h"
#include "groundit/prompt.h"

namespace groundit {

// Per-noun detection thresholds with a global fallback.
struct ThresholdTable {
  double fallback = 0.5;
  std::map<std::string, double> per_noun;

  double For(const std::string& noun) const;
  std::vector<double> For(const NounSet& nouns) const;
  bool operator==(const ThresholdTable&) const = default;
};

// Pipeline settings. Defaults follow the reference configuration: 96 frames
// in 12 noise segments, LoRA r=64 / alpha=128, 4 object and 8 time tokens,
// cosine schedule with 4 steps, guidance 1.0 and extraction at tau0 = 0.1.
struct RunConfig {
  int frames = 96;        // T
  int segments = 12;      // K_seg
  double tau0 = 0.1;
  int steps = 4;          // S
  ScheduleKind schedule = ScheduleKind::kCosine;
  double guidance = 1.0;  // GS
  int n_obj = 4;
  int n_time = 8;
  int n_bins = 128;
  int lora_rank = 64;     // r
  double lora_alpha = 128.0;
  int persistence = 3;    // K
  int min_span = 5;       // L
  ThresholdTable thresholds;
  double lambda_kl = 0.1;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument naming the first bad field.
  void Validate() const;

  DTLConfig Dtl() const;

  bool operator==(const RunConfig&) const = default;
};

// Flat key=value lines; '#' starts a comment line. Unknown keys, duplicate
// keys and unparsable values throw SchemaError with the line number.
// Recognised keys: T, K_seg, tau0, steps, schedule, guidance, n_obj, n_time,
// n_bins, r, alpha, persistence, min_span, thresholds, lambda_kl, seed.
// `thresholds` is a comma list of either a bare fallback value or noun:value
// pairs, e.g. "0.5,dog:0.6,red umbrella:0.4".
RunConfig ParseRunConfig(std::istream& in);
RunConfig LoadRunConfig(const std::string& path);

// Canonical key=value text that ParseRunConfig reads back to an equal config.
std::string DumpRunConfig(const RunConfig& config);

// Parses the `thresholds` value on its own.
ThresholdTable ParseThresholds(const std::string& value);
std::string FormatThresholds(const ThresholdTable& table);

}  // namespace groundit

#endif  // GROUNDIT_RUN_CONFIG_H_
