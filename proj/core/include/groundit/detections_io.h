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

#ifndef GROUNDIT_DETECTIONS_IO_H_
#define GROUNDIT_DETECTIONS_IO_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "groundit/grounding_gate.h"

namespace groundit {

// Reads detections JSONL, one object per line:
//   {"frame": 1, "noun": "dog", "proposal": 0, "score": 0.8,
//    "mask": {"w": 4, "h": 4, "runs": [3, 2, 11]}}
// "mask" is optional. Blank lines are skipped. Throws SchemaError carrying the
// 1-based line number of the first bad line.
std::vector<DetectionRecord> ReadDetectionsJsonl(std::istream& in);
std::vector<DetectionRecord> ReadDetectionsFile(const std::string& path);

void WriteDetectionsJsonl(std::ostream& out, const std::vector<DetectionRecord>& detections);

// {"gate": [...], "persist": [...], "t_s": int|null, "span": [s, e]|null}
std::string GateResultJson(const GateResult& result);

// One line per frame: {"frame": t, "w": .., "h": .., "runs": [..]}.
void WriteMasksJsonl(std::ostream& out, const std::vector<BinaryMask>& masks);
std::vector<BinaryMask> ReadMasksJsonl(std::istream& in);

}  // namespace groundit

#endif  // GROUNDIT_DETECTIONS_IO_H_
