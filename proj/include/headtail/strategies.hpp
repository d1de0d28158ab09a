// Copyright 2026 The headtail Authors
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
#include <optional>
#include <string_view>
#include <vector>

#include "headtail/dataset.hpp"
#include "headtail/reward.hpp"

namespace headtail {

enum class StrategyKind : std::uint8_t { vanilla, tc, hc, rp, ri, ar, gr, sc };

std::string_view to_string(StrategyKind kind);
StrategyKind strategy_from_string(std::string_view name);  // throws ConfigError

// True for the strategies that draw new trajectories (ar, gr, sc).
bool needs_sampler(StrategyKind kind);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::vanilla;
  int L = 4;  // tail threshold for tc and gr
  int S = 4;  // step count for gr
  int K = 8;  // sampling number
  int min_cot_tokens = kDefaultMinCotTokens;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// The policy capability the resampling strategies draw from. Implementations
// must be deterministic given (root seed, query id, per-query call counter).
// Returned trajectories carry origin/sample_index placeholders; the strategy
// stamps its own.
class SamplerHandle {
 public:
  virtual ~SamplerHandle() = default;
  virtual Trajectory fresh_sample(const QueryRecord& query) = 0;
  // Continuation from the prefix before step `step` (1-based, 1 = empty
  // prefix) of a successful trajectory split into `num_steps` chunks.
  virtual Trajectory guided_sample(const QueryRecord& query, const Trajectory& prefix, int step,
                                   int num_steps) = 0;
  virtual Trajectory correct(const QueryRecord& query, const Trajectory& wrong) = 0;
};

struct ResampleResult {
  TrajectoryDataset resampled;
  TrajectoryDataset refiltered;
  TrajectoryDataset train;
};

TrajectoryDataset vanilla(const TrajectoryDataset& filtered);

// At most L correct responses per query; the kept subset is a seeded uniform
// choice keyed by (seed, query_id).
TrajectoryDataset threshold_clip(const TrajectoryDataset& filtered, int L, std::uint64_t seed);

// Drops every query whose responses were all correct (k_i = K).
TrajectoryDataset head_clip(const TrajectoryDataset& filtered, int K);

// Every solved query contributes exactly K entries, cycling its correct
// responses in canonical order with index ((k-1) mod k_i) + 1.
TrajectoryDataset repeat_pad(const TrajectoryDataset& filtered, int K);

// Each query contributes K - k_i entries: a canonical-order prefix when it has
// enough responses, otherwise the repeat_pad cycle.
TrajectoryDataset repeat_invert(const TrajectoryDataset& filtered, int K);

// K - k_i fresh draws for every corpus query (k_i = 0 included).
ResampleResult adaptive_resample(const TrajectoryDataset& filtered, SamplerHandle& sampler, int K,
                                 const AnswerNormalizationRules& rules);

// Prefix offsets 0 = p_1 < ... < p_S of S near-equal chunks, larger chunks
// first. Throws ConfigError("trajectory too short to split") if length < S.
std::vector<int> split_steps(const Trajectory& traj, int S);

// For tail queries (k_i < L), one guided draw per (successful trajectory, step).
ResampleResult guided_resample(const TrajectoryDataset& filtered, SamplerHandle& sampler, int L, int S,
                               const AnswerNormalizationRules& rules);

struct SelfCorrectResult {
  TrajectoryDataset train;
  std::size_t attempts = 0;
  std::size_t kept = 0;  // successful corrections; each adds two train entries
};

SelfCorrectResult self_correct_augment(const TrajectoryDataset& filtered, const TrajectoryDataset& discard,
                                       SamplerHandle& sampler, int K, int min_cot_tokens,
                                       const AnswerNormalizationRules& rules);

struct StrategyOutcome {
  StrategyOutcome(TrajectoryDataset train_set, std::size_t draws = 0)
      : train(std::move(train_set)), extra_draws(draws) {}

  TrajectoryDataset train;
  std::size_t extra_draws = 0;  // sampler calls made by the strategy
  std::optional<TrajectoryDataset> resampled;
  std::optional<TrajectoryDataset> refiltered;
};

// Dispatches on config.kind. `discard` and `sampler` are only consulted by
// the strategies that need them; passing nullptr for a resampling strategy
// throws ConfigError.
StrategyOutcome apply_strategy(const StrategyConfig& config, const TrajectoryDataset& filtered,
                               const TrajectoryDataset* discard, SamplerHandle* sampler,
                               const AnswerNormalizationRules& rules);

}  // namespace headtail
