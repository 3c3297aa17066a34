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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "premise_forge/cli.hpp"
#include "premise_forge/dataset.hpp"
#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"
#include "premise_forge/grpo.hpp"
#include "premise_forge/metrics.hpp"
#include "premise_forge/random.hpp"
#include "premise_forge/rewards.hpp"
#include "premise_forge/text.hpp"

namespace py = pybind11;
using namespace premise_forge;

namespace {

// JSON crosses the boundary as text; Python's json module does the rest.
py::object to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::string dumps(const py::handle& obj) {
  return py::module_::import("json").attr("dumps")(obj, py::arg("ensure_ascii") = false).cast<std::string>();
}

std::vector<QuestionSample> samples_from(const py::list& items) {
  std::vector<QuestionSample> out;
  out.reserve(items.size());
  std::size_t line = 0;
  for (const auto& item : items) out.push_back(dataset::parse_sample(dumps(item), ++line));
  return out;
}

std::vector<PredictionRecord> predictions_from(const py::list& items) {
  std::vector<PredictionRecord> out;
  out.reserve(items.size());
  std::size_t line = 0;
  for (const auto& item : items) out.push_back(dataset::parse_prediction(dumps(item), ++line));
  return out;
}

py::list samples_to(std::span<const QuestionSample> samples) {
  py::list out;
  for (const auto& s : samples) out.append(to_python(to_json(s)));
  return out;
}

metrics::Metric parse_metric(const std::string& name) {
  if (name == "fpc") return metrics::Metric::FPC;
  if (name == "fpdp") return metrics::Metric::FPDP;
  if (name == "tpir") return metrics::Metric::TPIR;
  throw py::value_error("metric must be one of fpc, fpdp, tpir");
}

PremiseLabel parse_gold(const std::string& s) {
  auto label = parse_label(s);
  if (!label) throw py::value_error("label must be false_premise or true_premise");
  return *label;
}

grpo::CandidateGroup make_group(std::vector<double> rewards, std::vector<double> logp_current,
                                std::vector<double> logp_old, std::vector<double> logp_ref,
                                std::vector<std::pair<std::vector<double>, std::vector<double>>> distributions) {
  grpo::CandidateGroup g;
  g.rewards = std::move(rewards);
  g.logp_current = std::move(logp_current);
  g.logp_old = std::move(logp_old);
  g.logp_ref = std::move(logp_ref);
  for (auto& [cur, ref] : distributions) g.distributions.push_back({std::move(cur), std::move(ref)});
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "False-premise VQA toolkit: metrics, rewards, GRPO math and dataset I/O.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<PreconditionError>(m, "PreconditionError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base);
  py::register_exception<EmptyInput>(m, "EmptyInput", base);
  py::register_exception<SupportMismatch>(m, "SupportMismatch", base);
  py::register_exception<InvalidGroup>(m, "InvalidGroup", base);
  py::register_exception<NonFiniteInput>(m, "NonFiniteInput", base);

  py::class_<Pcg64>(m, "Pcg64")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
      .def("next", [](Pcg64& r) { return r(); })
      .def("bounded", [](Pcg64& r, std::uint64_t bound) {
        if (bound == 0) throw py::value_error("bound must be positive");
        return r.bounded(bound);
      })
      .def_property_readonly("state", [](const Pcg64& r) {
        const uint128 s = r.state();
        return py::int_(static_cast<std::uint64_t>(s >> 64)).attr("__lshift__")(64).attr("__or__")(
            py::int_(static_cast<std::uint64_t>(s)));
      })
      .def_property_readonly("increment", [](const Pcg64& r) {
        const uint128 s = r.increment();
        return py::int_(static_cast<std::uint64_t>(s >> 64)).attr("__lshift__")(64).attr("__or__")(
            py::int_(static_cast<std::uint64_t>(s)));
      });

  // Text and dataset ----------------------------------------------------------
  m.def("normalize_premise", [](const std::string& s) { return text::normalize_premise(s); });
  m.def(
      "compute_sample_id",
      [](const std::string& image_id, const std::string& subtype, const std::string& label,
         const std::string& question) {
        auto st = parse_subtype(subtype);
        if (!st) throw py::value_error("unknown subtype '" + subtype + "'");
        return compute_sample_id(image_id, *st, parse_gold(label), question);
      },
      py::arg("image_id"), py::arg("subtype"), py::arg("label"), py::arg("question"));
  m.def("load_dataset", [](const std::filesystem::path& p) { return samples_to(dataset::load(p)); });
  m.def("save_dataset",
        [](const std::filesystem::path& p, const py::list& samples) { dataset::save(p, samples_from(samples)); });
  m.def("validate_dataset", [](const std::filesystem::path& p) {
    const auto result = dataset::load_with_issues(p);
    py::list issues;
    for (const auto& i : result.issues) {
      issues.append(py::dict(py::arg("line") = i.line, py::arg("field") = i.field, py::arg("message") = i.message));
    }
    return py::make_tuple(samples_to(result.samples), issues);
  });
  m.def(
      "split",
      [](const py::list& samples, std::array<double, 3> fractions, std::uint64_t seed) {
        const auto parts = dataset::split(samples_from(samples), {fractions[0], fractions[1], fractions[2]}, seed);
        py::dict out;
        for (const auto& part : parts) out[py::str(std::string(dataset::to_string(part.name)))] = samples_to(part.samples);
        return out;
      },
      py::arg("samples"), py::arg("fractions") = std::array<double, 3>{0.5, 0.25, 0.25}, py::arg("seed") = 0);

  // Metrics -------------------------------------------------------------------
  m.def("compute_metrics", [](const py::list& predictions) {
    return to_python(metrics::to_json(metrics::compute_metrics(predictions_from(predictions))));
  });
  m.def(
      "bootstrap_std",
      [](const py::list& predictions, const std::string& metric, std::size_t resamples, std::uint64_t seed) {
        const auto r = metrics::bootstrap_std(predictions_from(predictions), parse_metric(metric), resamples, seed);
        return py::make_tuple(r.std, r.defined, r.skipped);
      },
      py::arg("predictions"), py::arg("metric"), py::arg("resamples") = 1000, py::arg("seed") = 0);
  m.def("format_cell", &metrics::format_cell, py::arg("value"), py::arg("std") = std::nullopt);

  // Evaluator and rewards -----------------------------------------------------
  m.def(
      "classify_response",
      [](const std::string& raw, std::optional<std::vector<std::string>> deny_list, bool fallback) {
        const auto& list = deny_list ? *deny_list : default_deny_list();
        return std::string(to_string(classify_response(raw, list, fallback)));
      },
      py::arg("raw_text"), py::arg("deny_list") = std::nullopt, py::arg("fallback") = true);
  m.def("format_reward", [](std::string text) { return rewards::format_reward(rewards::Completion(std::move(text))); });
  m.def("answer_reward", [](std::string text, const std::string& gold) {
    return rewards::answer_reward(rewards::Completion(std::move(text)), parse_gold(gold));
  });
  m.def(
      "combine_rewards",
      [](double f, double a, double r, std::array<double, 3> w) {
        return rewards::combine(f, a, r, {w[0], w[1], w[2]});
      },
      py::arg("format"), py::arg("answer"), py::arg("reasoning"),
      py::arg("weights") = std::array<double, 3>{1.0, 1.0, 1.0});
  m.def("parse_judge_score", &rewards::parse_judge_score);

  // GRPO ------------------------------------------------------------------------
  m.def("group_advantages", [](std::vector<double> r) { return grpo::group_advantages(r); });
  m.def("importance_ratios",
        [](std::vector<double> cur, std::vector<double> old) { return grpo::importance_ratios(cur, old); });
  m.def("kl_divergence", [](std::vector<double> p, std::vector<double> q) { return grpo::kl_divergence(p, q); });
  m.def("kl_estimator_k3",
        [](std::vector<double> cur, std::vector<double> ref) { return grpo::kl_estimator_k3(cur, ref); });
  m.def(
      "grpo_objective",
      [](std::vector<double> rewards, std::vector<double> logp_current, std::vector<double> logp_old, double beta,
         std::vector<double> logp_ref, std::vector<std::pair<std::vector<double>, std::vector<double>>> dists) {
        const auto g = make_group(std::move(rewards), std::move(logp_current), std::move(logp_old),
                                  std::move(logp_ref), std::move(dists));
        const auto r = grpo::analyze_group(g, beta);
        py::dict out;
        out["advantages"] = r.advantages;
        out["ratios"] = r.ratios;
        out["aggregate"] = r.aggregate;
        out["kl"] = r.kl;
        out["objective"] = r.objective;
        return out;
      },
      py::arg("rewards"), py::arg("logp_current"), py::arg("logp_old"), py::arg("beta") = 0.0,
      py::arg("logp_ref") = std::vector<double>{},
      py::arg("distributions") = std::vector<std::pair<std::vector<double>, std::vector<double>>>{});

  // CLI -------------------------------------------------------------------------
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
