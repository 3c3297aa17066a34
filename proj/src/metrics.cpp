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

#include "premise_forge/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>
#include <unordered_map>

#include "premise_forge/errors.hpp"
#include "premise_forge/random.hpp"

namespace premise_forge::metrics {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

Counts tally(std::span<const PredictionRecord> predictions) {
  Counts c;
  for (const auto& p : predictions) c.add(p.gold_label, p.predicted);
  return c;
}

MetricsReport make_report(Scope scope, std::string name,
                          std::span<const PredictionRecord> predictions) {
  MetricsReport r;
  r.scope = scope;
  r.name = std::move(name);
  r.counts = tally(predictions);
  r.n = r.counts.n;
  r.fpc = r.counts.value(Metric::FPC).value_or(0.0);
  r.fpdp = r.counts.value(Metric::FPDP);
  r.tpir = r.counts.value(Metric::TPIR);
  return r;
}

std::optional<double> try_bootstrap(std::span<const PredictionRecord> predictions, Metric metric,
                                    const BreakdownOptions& options) {
  if (options.resamples == 0) return std::nullopt;
  try {
    return bootstrap_std(predictions, metric, options.resamples, options.seed, options.threads).std;
  } catch (const AllResamplesUndefined&) {
    return std::nullopt;
  }
}

void attach_uncertainty(MetricsReport& r, std::span<const PredictionRecord> predictions,
                        const BreakdownOptions& options) {
  r.fpc_std = try_bootstrap(predictions, Metric::FPC, options);
  r.fpdp_std = try_bootstrap(predictions, Metric::FPDP, options);
  r.tpir_std = try_bootstrap(predictions, Metric::TPIR, options);
}

nlohmann::ordered_json optional_json(std::optional<double> v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

const MetricsReport* find(std::span<const MetricsReport> reports, Scope scope,
                          std::string_view name) {
  for (const auto& r : reports) {
    if (r.scope == scope && r.name == name) return &r;
  }
  return nullptr;
}

std::string row_cells(const MetricsReport* r) {
  if (r == nullptr) return " n/a | n/a | n/a |";
  return fmt::format(" {} | {} | {} |", format_cell(r->fpc, r->fpc_std),
                     format_cell(r->fpdp, r->fpdp_std), format_cell(r->tpir, r->tpir_std));
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::FPC: return "FPC";
    case Metric::FPDP: return "FPDP";
    case Metric::TPIR: return "TPIR";
  }
  return "";
}

std::string_view to_string(Scope scope) noexcept {
  switch (scope) {
    case Scope::Overall: return "overall";
    case Scope::Level: return "level";
    case Scope::Subtype: return "subtype";
  }
  return "";
}

void Counts::add(PremiseLabel gold, Verdict predicted) noexcept {
  ++n;
  switch (predicted) {
    case Verdict::FalsePremise:
      ++predicted_fp;
      if (gold == PremiseLabel::FalsePremise) {
        ++correct_fp;
        ++correct;
      }
      break;
    case Verdict::TruePremise:
      ++predicted_tp;
      if (gold == PremiseLabel::TruePremise) {
        ++correct_tp;
        ++correct;
      }
      break;
    case Verdict::Unparseable:
      ++unparseable;
      break;
  }
}

std::optional<double> Counts::value(Metric metric) const noexcept {
  switch (metric) {
    case Metric::FPC:
      if (n == 0) return std::nullopt;
      return ratio(correct, n);
    case Metric::FPDP:
      if (predicted_fp == 0) return std::nullopt;
      return ratio(correct_fp, predicted_fp);
    case Metric::TPIR:
      if (predicted_tp == 0) return std::nullopt;
      return ratio(correct_tp, predicted_tp);
  }
  return std::nullopt;
}

MetricsReport compute_metrics(std::span<const PredictionRecord> predictions) {
  if (predictions.empty()) throw EmptyInput("compute_metrics: no predictions");
  return make_report(Scope::Overall, "overall", predictions);
}

BootstrapResult bootstrap_std(std::span<const PredictionRecord> predictions, Metric metric,
                              std::size_t resamples, std::uint64_t seed, unsigned threads) {
  if (resamples == 0) throw PreconditionError("bootstrap_std: resamples must be >= 1");
  if (predictions.empty()) throw EmptyInput("bootstrap_std: no predictions");
  const std::size_t n = predictions.size();
  std::vector<std::optional<double>> values(resamples);

  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < resamples; k += stride) {
      Pcg64 rng(seed, k);
      Counts c;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& p = predictions[rng.bounded(n)];
        c.add(p.gold_label, p.predicted);
      }
      values[k] = c.value(metric);
    }
  };

  const unsigned workers = std::max(1U, std::min<unsigned>(threads, resamples));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run, t, workers);
  }

  BootstrapResult result;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++result.defined;
    } else {
      ++result.skipped;
    }
  }
  if (result.defined == 0) {
    throw AllResamplesUndefined(fmt::format("bootstrap_std: {} undefined in all {} resamples",
                                            to_string(metric), resamples));
  }
  const double mean = sum / static_cast<double>(result.defined);
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  result.std = std::sqrt(ss / static_cast<double>(result.defined));
  return result;
}

std::vector<MetricsReport> compute_breakdown(std::span<const PredictionRecord> predictions,
                                             std::span<const QuestionSample> dataset,
                                             const BreakdownOptions& options) {
  if (predictions.empty()) throw EmptyInput("compute_breakdown: no predictions");
  std::unordered_map<std::string_view, const QuestionSample*> by_id;
  by_id.reserve(dataset.size());
  for (const auto& s : dataset) by_id.emplace(s.sample_id, &s);

  std::map<PremiseLevel, std::vector<PredictionRecord>> per_level;
  std::map<PremiseSubtype, std::vector<PredictionRecord>> per_subtype;
  for (const auto& p : predictions) {
    auto it = by_id.find(p.sample_id);
    if (it == by_id.end()) throw UnknownSampleId(p.sample_id);
    const QuestionSample& s = *it->second;
    if (s.label != p.gold_label) {
      throw PreconditionError("prediction for '" + p.sample_id +
                              "' carries a gold_label that disagrees with the dataset");
    }
    per_level[s.level].push_back(p);
    per_subtype[s.subtype].push_back(p);
  }

  std::vector<MetricsReport> out;
  out.push_back(make_report(Scope::Overall, "overall", predictions));
  attach_uncertainty(out.back(), predictions, options);
  for (auto level : all_levels()) {
    auto it = per_level.find(level);
    if (it == per_level.end()) continue;
    out.push_back(make_report(Scope::Level, std::string(to_string(level)), it->second));
    attach_uncertainty(out.back(), it->second, options);
  }
  for (auto subtype : all_subtypes()) {
    auto it = per_subtype.find(subtype);
    if (it == per_subtype.end()) continue;
    out.push_back(make_report(Scope::Subtype, std::string(to_string(subtype)), it->second));
    attach_uncertainty(out.back(), it->second, options);
  }
  return out;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["scope"] = to_string(r.scope);
  j["name"] = r.name;
  j["n"] = r.n;
  j["fpc"] = r.fpc;
  j["fpdp"] = optional_json(r.fpdp);
  j["tpir"] = optional_json(r.tpir);
  j["fpc_std"] = optional_json(r.fpc_std);
  j["fpdp_std"] = optional_json(r.fpdp_std);
  j["tpir_std"] = optional_json(r.tpir_std);
  j["counts"] = {{"correct", r.counts.correct},         {"predicted_fp", r.counts.predicted_fp},
                 {"correct_fp", r.counts.correct_fp},   {"predicted_tp", r.counts.predicted_tp},
                 {"correct_tp", r.counts.correct_tp},   {"unparseable", r.counts.unparseable}};
  return j;
}

nlohmann::ordered_json breakdown_to_json(std::span<const MetricsReport> reports,
                                         const std::string& model_name) {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  return j;
}

std::string format_cell(std::optional<double> value, std::optional<double> std) {
  if (!value) return "n/a";
  if (!std) return fmt::format("{:.1f}", *value * 100.0);
  return fmt::format("{:.1f}±{:.2f}", *value * 100.0, *std);
}

std::string render_markdown(std::span<const MetricsReport> reports, const std::string& model_name) {
  std::string out;
  out += "### Results by level\n\n";
  out += "| Model | Perceptual FPC | Perceptual FPDP | Perceptual TPIR "
         "| Cognitive FPC | Cognitive FPDP | Cognitive TPIR "
         "| Reasoning FPC | Reasoning FPDP | Reasoning TPIR |\n";
  out += "|---|---|---|---|---|---|---|---|---|---|\n";
  out += "| " + model_name + " |";
  for (auto level : all_levels()) out += row_cells(find(reports, Scope::Level, to_string(level)));
  out += "\n\n### Overall\n\n";
  out += "| Model | FPC (↑) | FPDP (↑) | TPIR (↑) |\n|---|---|---|---|\n";
  out += "| " + model_name + " |" + row_cells(find(reports, Scope::Overall, "overall")) + "\n";
  out += "\n### Results by subtype\n\n";
  out += "| Subtype | Level | N | FPC | FPDP | TPIR |\n|---|---|---|---|---|---|\n";
  for (auto subtype : all_subtypes()) {
    const auto* r = find(reports, Scope::Subtype, to_string(subtype));
    if (r == nullptr) continue;
    out += fmt::format("| {} | {} | {} |{}\n", to_string(subtype),
                       display_name(level_of(subtype)), r->n, row_cells(r));
  }
  return out;
}

}  // namespace premise_forge::metrics
