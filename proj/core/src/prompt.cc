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

#include "groundit/prompt.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace groundit {
namespace {

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view Trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Lexicon::Lexicon(std::initializer_list<std::string> terms) {
  for (const auto& t : terms) Add(t);
}

void Lexicon::Add(std::string term) {
  term = ToLower(Trim(term));
  if (term.empty()) return;
  if (terms_.insert(term).second) ordered_.push_back(std::move(term));
}

Lexicon Lexicon::Parse(std::istream& in) {
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    const auto trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    lex.Add(std::string(trimmed));
  }
  return lex;
}

Lexicon Lexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open lexicon: " + path);
  return Parse(in);
}

bool Lexicon::Contains(std::string_view term) const {
  return terms_.find(term) != terms_.end();
}

std::vector<std::string> TokenizeQuery(std::string_view query) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < query.size()) {
    while (i < query.size() && std::isspace(static_cast<unsigned char>(query[i]))) ++i;
    std::size_t j = i;
    while (j < query.size() && !std::isspace(static_cast<unsigned char>(query[j]))) ++j;
    std::string_view tok = query.substr(i, j - i);
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.front()))) {
      tok.remove_prefix(1);
    }
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) {
      tok.remove_suffix(1);
    }
    if (!tok.empty()) tokens.push_back(ToLower(tok));
    i = j;
  }
  return tokens;
}

NounSet ExtractNouns(std::string_view query, const Lexicon& nouns,
                     const Lexicon& modifiers) {
  const auto tokens = TokenizeQuery(query);
  NounSet out;
  // Head nouns already emitted; "umbrella" and "red umbrella" share one track.
  std::set<std::string, std::less<>> heads;
  const auto emit = [&](std::string phrase, const std::string& head) {
    if (heads.insert(head).second) out.nouns.push_back(std::move(phrase));
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i + 1 < tokens.size() && modifiers.Contains(tokens[i]) &&
        nouns.Contains(tokens[i + 1])) {
      emit(tokens[i] + " " + tokens[i + 1], tokens[i + 1]);
      ++i;
    } else if (nouns.Contains(tokens[i])) {
      emit(tokens[i], tokens[i]);
    }
  }
  return out;
}

}  // namespace groundit
