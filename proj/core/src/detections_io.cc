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

#include "groundit/detections_io.h"

#include <fstream>
#include <limits>

#include "groundit/errors.h"
#include "json.hpp"

namespace groundit {
namespace {

using nlohmann::json;

int RequireInt(const json& obj, const char* key, int line) {
  if (!obj.contains(key)) throw SchemaError(std::string("missing field '") + key + "'", line);
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field '") + key + "' must be an integer", line);
  }
  const auto i = v.get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw SchemaError(std::string("field '") + key + "' out of range", line);
  }
  return static_cast<int>(i);
}

BinaryMask MaskFromJson(const json& m, int line) {
  if (!m.is_object()) throw SchemaError("mask must be an object", line);
  BinaryMask mask;
  mask.width = RequireInt(m, "w", line);
  mask.height = RequireInt(m, "h", line);
  if (!m.contains("runs") || !m.at("runs").is_array()) {
    throw SchemaError("mask.runs must be an array", line);
  }
  for (const auto& r : m.at("runs")) {
    if (!r.is_number_unsigned() && !(r.is_number_integer() && r.get<long long>() >= 0)) {
      throw SchemaError("mask runs must be non-negative integers", line);
    }
    mask.runs.push_back(r.get<std::uint32_t>());
  }
  try {
    ValidateMask(mask);
  } catch (const CorruptMaskError& e) {
    throw SchemaError(std::string("corrupt mask: ") + e.what(), line);
  }
  return mask;
}

json MaskToJson(const BinaryMask& m) {
  return json{{"w", m.width}, {"h", m.height}, {"runs", m.runs}};
}

template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn&& fn) {
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw SchemaError("expected a JSON object", line);
    fn(obj, line);
  }
}

}  // namespace

std::vector<DetectionRecord> ReadDetectionsJsonl(std::istream& in) {
  std::vector<DetectionRecord> out;
  ForEachJsonLine(in, [&out](const json& obj, int line) {
    DetectionRecord d;
    d.frame = RequireInt(obj, "frame", line);
    if (d.frame < 1) throw SchemaError("frame must be >= 1", line);
    if (!obj.contains("noun") || !obj.at("noun").is_string()) {
      throw SchemaError("field 'noun' must be a string", line);
    }
    d.noun = obj.at("noun").get<std::string>();
    d.proposal = RequireInt(obj, "proposal", line);
    if (d.proposal < 0) throw SchemaError("proposal must be >= 0", line);
    if (!obj.contains("score") || !obj.at("score").is_number()) {
      throw SchemaError("field 'score' must be a number", line);
    }
    d.score = obj.at("score").get<double>();
    if (!(d.score >= 0.0 && d.score <= 1.0)) throw SchemaError("score outside [0, 1]", line);
    if (obj.contains("mask") && !obj.at("mask").is_null()) {
      d.mask = MaskFromJson(obj.at("mask"), line);
    }
    out.push_back(std::move(d));
  });
  return out;
}

std::vector<DetectionRecord> ReadDetectionsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open detections file " + path, 0);
  return ReadDetectionsJsonl(in);
}

void WriteDetectionsJsonl(std::ostream& out, const std::vector<DetectionRecord>& detections) {
  for (const auto& d : detections) {
    json obj{{"frame", d.frame}, {"noun", d.noun}, {"proposal", d.proposal}, {"score", d.score}};
    if (d.mask) obj["mask"] = MaskToJson(*d.mask);
    out << obj.dump() << '\n';
  }
}

std::string GateResultJson(const GateResult& result) {
  nlohmann::ordered_json obj;
  obj["gate"] = result.gate;
  obj["persist"] = result.persist;
  obj["t_s"] = result.start ? nlohmann::ordered_json(*result.start) : nullptr;
  obj["span"] = result.span
                    ? nlohmann::ordered_json::array({result.span->first, result.span->last})
                    : nullptr;
  return obj.dump();
}

void WriteMasksJsonl(std::ostream& out, const std::vector<BinaryMask>& masks) {
  for (std::size_t t = 0; t < masks.size(); ++t) {
    json obj = MaskToJson(masks[t]);
    obj["frame"] = t + 1;
    out << obj.dump() << '\n';
  }
}

std::vector<BinaryMask> ReadMasksJsonl(std::istream& in) {
  std::vector<BinaryMask> out;
  ForEachJsonLine(in, [&out](const json& obj, int line) {
    const int frame = RequireInt(obj, "frame", line);
    if (frame != static_cast<int>(out.size()) + 1) {
      throw SchemaError("mask frames must be consecutive from 1", line);
    }
    out.push_back(MaskFromJson(obj, line));
  });
  return out;
}

}  // namespace groundit
