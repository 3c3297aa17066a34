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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace premise_forge::text {

std::string_view trim(std::string_view s) noexcept;

/// ASCII case folding; bytes outside ASCII pass through unchanged.
std::string fold_case(std::string_view s);

/// Identity key for premises: case-folded, internal whitespace collapsed to
/// one space, surrounding whitespace and terminal punctuation stripped.
/// Two premises are "the same" iff their normalized forms are equal.
std::string normalize_premise(std::string_view s);

/// Lower-cased alphanumeric tokens, in order of appearance.
std::vector<std::string> tokenize(std::string_view s);

bool is_stopword(std::string_view lower_token) noexcept;

/// Tokens of `s` minus stopwords.
std::vector<std::string> content_words(std::string_view s);

/// Fraction of the premise's content words that occur among the caption's
/// tokens. Falls back to all tokens when the premise is made only of
/// stopwords; returns 1.0 for a premise with no tokens at all.
double premise_coverage(std::string_view premise, std::string_view caption);

/// Whitespace-separated words containing at least one alphanumeric byte.
std::size_t count_words(std::string_view s);

bool icontains(std::string_view haystack, std::string_view needle);
bool istarts_with(std::string_view s, std::string_view prefix);

std::vector<std::string_view> split_lines(std::string_view s);

}  // namespace premise_forge::text
