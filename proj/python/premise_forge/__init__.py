# Copyright 2026 The premise-forge Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the premise-forge C++ core."""

from ._core import (
    ConfigError,
    EmptyInput,
    Error,
    InvalidGroup,
    InvariantViolation,
    NonFiniteInput,
    ParseError,
    Pcg64,
    PreconditionError,
    SupportMismatch,
    answer_reward,
    bootstrap_std,
    classify_response,
    combine_rewards,
    compute_metrics,
    compute_sample_id,
    format_cell,
    format_reward,
    group_advantages,
    grpo_objective,
    importance_ratios,
    kl_divergence,
    kl_estimator_k3,
    load_dataset,
    normalize_premise,
    parse_judge_score,
    run_cli,
    save_dataset,
    split,
    validate_dataset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
