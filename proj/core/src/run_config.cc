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

#include "groundit/run_config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "groundit/errors.h"

namespace groundit {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T ParseNumber(std::string_view text, std::string_view key) {
  text = Trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double ThresholdTable::For(const std::string& noun) const {
  const auto it = per_noun.find(noun);
  return it == per_noun.end() ? fallback : it->second;
}

std::vector<double> ThresholdTable::For(const NounSet& nouns) const {
  std::vector<double> out;
  out.reserve(nouns.size());
  for (const auto& n : nouns.nouns) out.push_back(For(n));
  return out;
}

ThresholdTable ParseThresholds(const std::string& value) {
  ThresholdTable table;
  bool have_fallback = false;
  std::string_view rest = value;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = Trim(rest.substr(0, comma));
    if (item.empty()) throw std::invalid_argument("empty entry in thresholds");
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) {
      if (have_fallback) throw std::invalid_argument("thresholds: two fallback values");
      table.fallback = ParseNumber<double>(item, "thresholds");
      have_fallback = true;
    } else {
      const std::string noun(Trim(item.substr(0, colon)));
      if (noun.empty()) throw std::invalid_argument("thresholds: empty noun");
      if (!table.per_noun.emplace(noun, ParseNumber<double>(item.substr(colon + 1), "thresholds"))
               .second) {
        throw std::invalid_argument("thresholds: duplicate noun '" + noun + "'");
      }
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return table;
}

std::string FormatThresholds(const ThresholdTable& table) {
  std::string out = FormatDouble(table.fallback);
  for (const auto& [noun, value] : table.per_noun) out += "," + noun + ":" + FormatDouble(value);
  return out;
}

void RunConfig::Validate() const {
  Dtl().Validate();
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(n_obj >= 0, "n_obj must be >= 0");
  require(n_time >= 0 && n_time <= frames, "n_time must lie in [0, T]");
  require(n_bins >= 1, "n_bins must be >= 1");
  require(lora_rank >= 1, "r must be >= 1");
  require(std::isfinite(lora_alpha) && lora_alpha > 0.0, "alpha must be > 0");
  require(persistence >= 1, "persistence must be >= 1");
  require(min_span >= 1, "min_span must be >= 1");
  require(std::isfinite(lambda_kl) && lambda_kl >= 0.0, "lambda_kl must be >= 0");
  const auto valid_tau = [](double t) { return t > 0.0 && t <= 1.0; };
  require(valid_tau(thresholds.fallback), "thresholds must lie in (0, 1]");
  for (const auto& [noun, t] : thresholds.per_noun) {
    require(valid_tau(t), "thresholds must lie in (0, 1]");
  }
}

DTLConfig RunConfig::Dtl() const {
  DTLConfig d;
  d.tau0 = tau0;
  d.steps = steps;
  d.schedule = schedule;
  d.guidance = guidance;
  d.frames = frames;
  d.segments = segments;
  return d;
}

RunConfig ParseRunConfig(std::istream& in) {
  RunConfig cfg;
  using Setter = std::function<void(std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"T", [&](auto v) { cfg.frames = ParseNumber<int>(v, "T"); }},
      {"K_seg", [&](auto v) { cfg.segments = ParseNumber<int>(v, "K_seg"); }},
      {"tau0", [&](auto v) { cfg.tau0 = ParseNumber<double>(v, "tau0"); }},
      {"steps", [&](auto v) { cfg.steps = ParseNumber<int>(v, "steps"); }},
      {"schedule",
       [&](auto v) {
         const auto kind = ParseScheduleKind(Trim(v));
         if (!kind) throw std::invalid_argument("schedule must be cosine or linear");
         cfg.schedule = *kind;
       }},
      {"guidance", [&](auto v) { cfg.guidance = ParseNumber<double>(v, "guidance"); }},
      {"n_obj", [&](auto v) { cfg.n_obj = ParseNumber<int>(v, "n_obj"); }},
      {"n_time", [&](auto v) { cfg.n_time = ParseNumber<int>(v, "n_time"); }},
      {"n_bins", [&](auto v) { cfg.n_bins = ParseNumber<int>(v, "n_bins"); }},
      {"r", [&](auto v) { cfg.lora_rank = ParseNumber<int>(v, "r"); }},
      {"alpha", [&](auto v) { cfg.lora_alpha = ParseNumber<double>(v, "alpha"); }},
      {"persistence", [&](auto v) { cfg.persistence = ParseNumber<int>(v, "persistence"); }},
      {"min_span", [&](auto v) { cfg.min_span = ParseNumber<int>(v, "min_span"); }},
      {"thresholds", [&](auto v) { cfg.thresholds = ParseThresholds(std::string(v)); }},
      {"lambda_kl", [&](auto v) { cfg.lambda_kl = ParseNumber<double>(v, "lambda_kl"); }},
      {"seed", [&](auto v) { cfg.seed = ParseNumber<std::uint64_t>(v, "seed"); }},
  };
  std::set<std::string, std::less<>> seen;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto trimmed = Trim(text);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) throw SchemaError("expected key=value", line);
    const auto key = Trim(trimmed.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) throw SchemaError("unknown key '" + std::string(key) + "'", line);
    if (!seen.insert(std::string(key)).second) {
      throw SchemaError("duplicate key '" + std::string(key) + "'", line);
    }
    try {
      it->second(trimmed.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what(), line);
    }
  }
  try {
    cfg.Validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("invalid config: ") + e.what(), 0);
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config " + path, 0);
  return ParseRunConfig(in);
}

std::string DumpRunConfig(const RunConfig& c) {
  std::ostringstream out;
  out << "T=" << c.frames << '\n'
      << "K_seg=" << c.segments << '\n'
      << "tau0=" << FormatDouble(c.tau0) << '\n'
      << "steps=" << c.steps << '\n'
      << "schedule=" << ScheduleName(c.schedule) << '\n'
      << "guidance=" << FormatDouble(c.guidance) << '\n'
      << "n_obj=" << c.n_obj << '\n'
      << "n_time=" << c.n_time << '\n'
      << "n_bins=" << c.n_bins << '\n'
      << "r=" << c.lora_rank << '\n'
      << "alpha=" << FormatDouble(c.lora_alpha) << '\n'
      << "persistence=" << c.persistence << '\n'
      << "min_span=" << c.min_span << '\n'
      << "thresholds=" << FormatThresholds(c.thresholds) << '\n'
      << "lambda_kl=" << FormatDouble(c.lambda_kl) << '\n'
      << "seed=" << c.seed << '\n';
  return out.str();
}

}  // namespace groundit
