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

#include <optional>
#include <span>
#include <vector>

namespace premise_forge::grpo {

/// Population std below this maps every advantage to zero.
inline constexpr double kVarianceGuard = 1e-8;
/// Tolerance on probability vectors summing to one.
inline constexpr double kSimplexTolerance = 1e-9;

/// Next-token distributions of one candidate under the current and the
/// reference policy.
struct DistributionPair {
  std::vector<double> current;
  std::vector<double> reference;
};

/// G sampled completions for one prompt. `logp_ref` and `distributions` are the
/// two alternative inputs for the KL penalty; either may be empty.
struct CandidateGroup {
  std::vector<double> rewards;
  std::vector<double> logp_current;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
  std::vector<DistributionPair> distributions;

  std::size_t size() const noexcept { return rewards.size(); }
  bool has_distributions() const noexcept { return !distributions.empty(); }
  bool has_reference_logps() const noexcept { return !logp_ref.empty(); }

  /// Throws InvalidGroup / NonFiniteInput when the group is malformed.
  void validate() const;
};

/// (r_i - mean) / population_std, or all zeros when std < kVarianceGuard.
std::vector<double> group_advantages(std::span<const double> rewards);

/// exp(logp_current - logp_old), elementwise.
std::vector<double> importance_ratios(std::span<const double> logp_current,
                                      std::span<const double> logp_old);

/// Sum of importance ratio times group advantage.
double aggregate_reward(const CandidateGroup& group);

/// Exact KL(p || q) for categorical distributions, with 0 ln 0 = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Sample-based KL estimate: mean of (x - ln x - 1), x = pi_ref / pi_current.
double kl_estimator_k3(std::span<const double> logp_current, std::span<const double> logp_ref);

/// The KL penalty for a group: mean exact KL over candidates when full
/// distributions are present, otherwise the k3 estimate. nullopt when the
/// group carries neither.
std::optional<double> kl_term(const CandidateGroup& group);

/// aggregate_reward - beta * kl_term. A group without KL inputs is only
/// accepted with beta == 0.
double grpo_objective(const CandidateGroup& group, double beta);

struct GroupReport {
  std::vector<double> advantages;
  std::vector<double> ratios;
  double aggregate = 0.0;
  std::optional<double> kl;
  double objective = 0.0;
};

GroupReport analyze_group(const CandidateGroup& group, double beta);

}  // namespace premise_forge::grpo
