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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "premise_forge/records.hpp"
#include "premise_forge/taxonomy.hpp"

namespace testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("premise_forge_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << contents;
}

/// A valid sample; the id is computed from the content.
inline premise_forge::QuestionSample make_sample(
    const std::string& image_id, premise_forge::PremiseSubtype subtype, premise_forge::PremiseLabel label,
    const std::string& question, const std::string& premise = "The sign means stop.",
    const std::string& corrupted = "The sign means yield.") {
  premise_forge::QuestionSample s;
  s.image_id = image_id;
  s.subtype = subtype;
  s.level = premise_forge::level_of(subtype);
  s.original_premise = premise;
  s.label = label;
  s.embedded_premise = label == premise_forge::PremiseLabel::TruePremise ? premise : corrupted;
  s.question = question;
  s.sample_id = premise_forge::compute_sample_id(image_id, subtype, label, question);
  return s;
}

}  // namespace testing
