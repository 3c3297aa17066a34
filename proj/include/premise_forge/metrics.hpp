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

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "premise_forge/records.hpp"

namespace premise_forge::metrics {

enum class Metric { FPC, FPDP, TPIR };

enum class Scope { Overall, Level, Subtype };

std::string_view to_string(Metric metric) noexcept;
std::string_view to_string(Scope scope) noexcept;

/// Tallies for one set of predictions. Unparseable predictions count toward
/// `n` but toward neither precision denominator.
struct Counts {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t predicted_fp = 0;
  std::size_t correct_fp = 0;
  std::size_t predicted_tp = 0;
  std::size_t correct_tp = 0;
  std::size_t unparseable = 0;

  void add(PremiseLabel gold, Verdict predicted) noexcept;
  std::optional<double> value(Metric metric) const noexcept;
};

struct MetricsReport {
  Scope scope = Scope::Overall;
  std::string name = "overall";
  std::size_t n = 0;
  double fpc = 0.0;
  std::optional<double> fpdp;  // undefined when nothing was predicted false-premise
  std::optional<double> tpir;  // undefined when nothing was predicted true-premise
  std::optional<double> fpc_std;
  std::optional<double> fpdp_std;
  std::optional<double> tpir_std;
  Counts counts;
};

/// FPC, FPDP and TPIR over all predictions. Throws EmptyInput.
MetricsReport compute_metrics(std::span<const PredictionRecord> predictions);

struct BootstrapResult {
  double std = 0.0;
  std::size_t defined = 0;
  std::size_t skipped = 0;  // resamples in which the metric was undefined
};

/// Population std of `metric` over `resamples` bootstrap resamples of size N.
/// Resample k draws from Pcg64(seed, k), so the result does not depend on
/// `threads`. Throws AllResamplesUndefined.
BootstrapResult bootstrap_std(std::span<const PredictionRecord> predictions, Metric metric,
                              std::size_t resamples, std::uint64_t seed, unsigned threads = 1);

struct BreakdownOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Overall report, then one per non-empty level, then one per non-empty
/// subtype, with scope membership taken from the dataset sample.
std::vector<MetricsReport> compute_breakdown(std::span<const PredictionRecord> predictions,
                                             std::span<const QuestionSample> dataset,
                                             const BreakdownOptions& options = {});

nlohmann::ordered_json to_json(const MetricsReport& report);
nlohmann::ordered_json breakdown_to_json(std::span<const MetricsReport> reports,
                                         const std::string& model_name);

/// "75.9±0.04": the value as a percentage with one decimal, then the
/// bootstrap std with two decimals. "n/a" when undefined.
std::string format_cell(std::optional<double> value, std::optional<double> std);

/// Markdown rendering: a per-level grid (FPC/FPDP/TPIR under each of the
/// three levels), an overall grid, and a per-subtype grid.
std::string render_markdown(std::span<const MetricsReport> reports, const std::string& model_name);

}  // namespace premise_forge::metrics
