// Copyright 2026 The premise-forge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "premise_forge/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace premise_forge::text {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_terminal_punct(char c) {
  switch (c) {
    case '.': case '!': case '?': case ',': case ';': case ':':
      return true;
    default:
      return false;
  }
}

// Sorted for binary search.
constexpr std::array<std::string_view, 62> kStopwords{
    "a",     "about", "above", "after", "all",   "also",  "an",    "and",   "any",
    "are",   "as",    "at",    "be",    "been",  "being", "both",  "but",   "by",
    "can",   "could", "did",   "do",    "does",  "during", "each", "for",   "from",
    "had",   "has",   "have",  "he",    "her",   "his",   "in",    "into",  "is",
    "it",    "its",   "of",    "on",    "or",    "she",   "so",    "some",  "than",
    "that",  "the",   "their", "them",  "there", "these", "they",  "this",  "those",
    "to",    "very",  "was",   "were",  "which", "while", "with",  "would"};
static_assert(std::is_sorted(kStopwords.begin(), kStopwords.end()));

}  // namespace

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string normalize_premise(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(lower(c));
  }
  while (!out.empty() && (is_terminal_punct(out.back()) || out.back() == ' ')) out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_alnum(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_stopword(std::string_view lower_token) noexcept {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), lower_token);
}

std::vector<std::string> content_words(std::string_view s) {
  auto tokens = tokenize(s);
  std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
  return tokens;
}

double premise_coverage(std::string_view premise, std::string_view caption) {
  auto words = content_words(premise);
  if (words.empty()) words = tokenize(premise);
  if (words.empty()) return 1.0;
  const auto caption_tokens = tokenize(caption);
  const std::set<std::string> present(caption_tokens.begin(), caption_tokens.end());
  const auto hits = std::count_if(words.begin(), words.end(),
                                  [&](const std::string& w) { return present.count(w) > 0; });
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  bool has_alnum = false;
  for (char c : s) {
    if (is_space(c)) {
      if (in_word && has_alnum) ++n;
      in_word = has_alnum = false;
    } else {
      in_word = true;
      has_alnum = has_alnum || is_alnum(c);
    }
  }
  if (in_word && has_alnum) ++n;
  return n;
}

bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) { return lower(a) == lower(b); });
  return it != haystack.end();
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), s.begin(),
                    [](char a, char b) { return lower(a) == lower(b); });
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    auto pos = s.find('\n');
    auto line = s.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace premise_forge::text
