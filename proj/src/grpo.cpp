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

#include "premise_forge/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "premise_forge/errors.hpp"

namespace premise_forge::grpo {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteInput(std::string(what) + "[" + std::to_string(i) + "] is not finite");
    }
  }
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw PreconditionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

void require_simplex(std::span<const double> p, const char* what) {
  if (p.empty()) throw PreconditionError(std::string(what) + " is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw PreconditionError(std::string(what) + " has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw PreconditionError(std::string(what) + " does not sum to 1");
  }
}

}  // namespace

void CandidateGroup::validate() const {
  const std::size_t g = rewards.size();
  if (g == 0) throw InvalidGroup("group is empty");
  if (logp_current.size() != g || logp_old.size() != g) {
    throw InvalidGroup("rewards, logp_current and logp_old must all have length G");
  }
  if (!logp_ref.empty() && logp_ref.size() != g) {
    throw InvalidGroup("logp_ref must be empty or have length G");
  }
  if (!distributions.empty() && distributions.size() != g) {
    throw InvalidGroup("distributions must be empty or have length G");
  }
  require_finite(rewards, "rewards");
  require_finite(logp_current, "logp_current");
  require_finite(logp_old, "logp_old");
  require_finite(logp_ref, "logp_ref");
  for (const auto& pair : distributions) {
    if (pair.current.size() != pair.reference.size()) {
      throw InvalidGroup("distribution pair has mismatched vocabulary sizes");
    }
    try {
      require_simplex(pair.current, "current distribution");
      require_simplex(pair.reference, "reference distribution");
    } catch (const PreconditionError& e) {
      throw InvalidGroup(e.what());
    }
  }
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  std::vector<double> out(g, 0.0);
  if (g == 0) return out;
  require_finite(rewards, "rewards");

  // Work relative to the first reward. Any constant shift of the inputs that
  // is representable leaves these differences, and hence the output, unchanged.
  const double pivot = rewards[0];
  std::vector<double> shifted(g);
  double sum = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    shifted[i] = rewards[i] - pivot;
    sum += shifted[i];
  }
  const double mean = sum / static_cast<double>(g);
  double ss = 0.0;
  for (double& d : shifted) {
    d -= mean;
    ss += d * d;
  }
  const double std_pop = std::sqrt(ss / static_cast<double>(g));
  if (!(std_pop >= kVarianceGuard)) return out;
  for (std::size_t i = 0; i < g; ++i) out[i] = shifted[i] / std_pop;
  return out;
}

std::vector<double> importance_ratios(std::span<const double> logp_current,
                                      std::span<const double> logp_old) {
  require_same_length(logp_current.size(), logp_old.size(), "importance_ratios");
  require_finite(logp_current, "logp_current");
  require_finite(logp_old, "logp_old");
  std::vector<double> out(logp_current.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(logp_current[i] - logp_old[i]);
    if (!std::isfinite(out[i])) {
      throw NonFiniteInput("importance ratio " + std::to_string(i) + " overflows");
    }
  }
  return out;
}

double aggregate_reward(const CandidateGroup& group) {
  group.validate();
  const auto adv = group_advantages(group.rewards);
  const auto ratios = importance_ratios(group.logp_current, group.logp_old);
  double total = 0.0;
  for (std::size_t i = 0; i < adv.size(); ++i) total += ratios[i] * adv[i];
  return total;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require_same_length(p.size(), q.size(), "kl_divergence");
  require_simplex(p, "p");
  require_simplex(q, "q");
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) {
      throw SupportMismatch("p[" + std::to_string(j) + "] > 0 where q is zero");
    }
    total += p[j] * std::log(p[j] / q[j]);
  }
  // Rounding can leave a tiny negative residue when p is close to q.
  return std::max(total, 0.0);
}

double kl_estimator_k3(std::span<const double> logp_current, std::span<const double> logp_ref) {
  require_same_length(logp_current.size(), logp_ref.size(), "kl_estimator_k3");
  require_finite(logp_current, "logp_current");
  require_finite(logp_ref, "logp_ref");
  if (logp_current.empty()) throw PreconditionError("kl_estimator_k3: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < logp_current.size(); ++i) {
    // x - ln x - 1 with x = e^d, written as expm1(d) - d.
    const double d = logp_ref[i] - logp_current[i];
    const double term = std::expm1(d) - d;
    if (!std::isfinite(term)) {
      throw NonFiniteInput("k3 term " + std::to_string(i) + " overflows");
    }
    total += std::max(term, 0.0);
  }
  return total / static_cast<double>(logp_current.size());
}

std::optional<double> kl_term(const CandidateGroup& group) {
  group.validate();
  if (group.has_distributions()) {
    double sum = 0.0;
    for (const auto& pair : group.distributions) sum += kl_divergence(pair.current, pair.reference);
    return sum / static_cast<double>(group.distributions.size());
  }
  if (group.has_reference_logps()) return kl_estimator_k3(group.logp_current, group.logp_ref);
  return std::nullopt;
}

double grpo_objective(const CandidateGroup& group, double beta) {
  return analyze_group(group, beta).objective;
}

GroupReport analyze_group(const CandidateGroup& group, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw PreconditionError("beta must be a finite non-negative number");
  }
  group.validate();
  GroupReport report;
  report.advantages = group_advantages(group.rewards);
  report.ratios = importance_ratios(group.logp_current, group.logp_old);
  for (std::size_t i = 0; i < report.advantages.size(); ++i) {
    report.aggregate += report.ratios[i] * report.advantages[i];
  }
  report.kl = kl_term(group);
  if (!report.kl && beta > 0.0) {
    throw InvalidGroup("beta > 0 requires distributions or logp_ref for the KL term");
  }
  report.objective = report.aggregate - beta * report.kl.value_or(0.0);
  return report;
}

}  // namespace premise_forge::grpo
