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

#include <doctest.h>

#include "premise_forge/hashing.hpp"
#include "premise_forge/text.hpp"

using namespace premise_forge;

TEST_CASE("sha256 matches published test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("base64 matches RFC 4648 vectors") {
  CHECK(base64_encode(std::string_view("")) == "");
  CHECK(base64_encode(std::string_view("f")) == "Zg==");
  CHECK(base64_encode(std::string_view("fo")) == "Zm8=");
  CHECK(base64_encode(std::string_view("foo")) == "Zm9v");
  CHECK(base64_encode(std::string_view("foobar")) == "Zm9vYmFy");
}

TEST_CASE("normalize_premise folds case, whitespace and terminal punctuation") {
  CHECK(text::normalize_premise("Three  Apples.") == text::normalize_premise("three apples"));
  CHECK(text::normalize_premise("  The sign\tmeans\nstop!?  ") == "the sign means stop");
  CHECK(text::normalize_premise("the sign means stop") != text::normalize_premise("the sign means yield"));
  CHECK(text::normalize_premise("") == "");
}

TEST_CASE("premise coverage ignores stopwords") {
  CHECK(text::premise_coverage("red stop sign", "A red stop sign stands at the corner.") == 1.0);
  CHECK(text::premise_coverage("red stop sign", "A dog sleeps.") == 0.0);
  CHECK(text::premise_coverage("the red car", "a red bus") == doctest::Approx(0.5));
  CHECK(text::content_words("The cat is on the mat") == std::vector<std::string>{"cat", "mat"});
}

TEST_CASE("small string helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::count_words("one two  three") == 3);
  CHECK(text::count_words(" -- , ") == 0);
  CHECK(text::icontains("A False Premise here", "false premise"));
  CHECK(text::istarts_with("FALSE_premise: x", "false_PREMISE"));
  CHECK(text::split_lines("a\r\nb\n\nc").size() == 4);
}
