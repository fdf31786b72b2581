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

#ifndef GROUNDIT_PROMPT_H_
#define GROUNDIT_PROMPT_H_

#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace groundit {

// A set of lowercase terms. Loaded from text with one term per line; blank
// lines and lines starting with '#' are skipped.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::initializer_list<std::string> terms);

  static Lexicon Parse(std::istream& in);
  static Lexicon Load(const std::string& path);

  bool Contains(std::string_view term) const;
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  // Terms in file order.
  const std::vector<std::string>& terms() const { return ordered_; }

 private:
  void Add(std::string term);

  std::set<std::string, std::less<>> terms_;
  std::vector<std::string> ordered_;
};

// Ordered, duplicate-free target nouns extracted from a query.
struct NounSet {
  std::vector<std::string> nouns;

  std::size_t size() const { return nouns.size(); }
  bool operator==(const NounSet&) const = default;
};

// Lowercases, splits on whitespace and strips punctuation from token edges.
std::vector<std::string> TokenizeQuery(std::string_view query);

// Walks the query tokens left to right. A modifier immediately followed by a
// noun becomes one phrase ("red umbrella"); a bare noun is emitted as is.
// Tokens in neither lexicon are skipped. Phrases sharing a head noun collapse
// to the first one seen.
NounSet ExtractNouns(std::string_view query, const Lexicon& nouns,
                     const Lexicon& modifiers = {});

}  // namespace groundit

#endif  // GROUNDIT_PROMPT_H_
