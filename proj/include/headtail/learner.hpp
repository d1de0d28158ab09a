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

#include <array>
#include <cstdint>
#include <map>

#include "headtail/dataset.hpp"
#include "headtail/strategies.hpp"

namespace headtail {

// Parameters of the simulated policy. The defaults are calibrated so that the
// simulator reproduces the head/tail drift of vanilla self-improvement.
struct LearnerParams {
  double learn_rate = 0.02;          // eta: exposure gain toward p = 1
  double forget_rate = 0.5;          // delta: decay of queries absent from training
  double length_imitation = 0.5;     // lambda: pull of mu_log_len toward the train lengths
  double prefix_gain = 1.0;          // gamma: how much a guided prefix helps
  double correction_base = 0.2;      // kappa0
  double correction_slope = 0.5;     // kappa1
  double sigma_log_len = 0.3;
  // Concentration c of the per-checkpoint success jitter Beta(p c, (1-p) c).
  // Draws from one checkpoint share the jitter, so they are correlated;
  // 0 disables it and every draw succeeds with exactly p.
  double session_concentration = 1.5;

  void validate() const;  // throws ConfigError
  bool operator==(const LearnerParams&) const = default;
};

struct LearnerState {
  int iteration = 0;
  std::map<QueryId, double> p;
  std::array<double, kNumLevels> mu_log_len{};
  LearnerParams params;
  std::uint64_t root_seed = 0;
  std::map<QueryId, std::uint64_t> draw_counter;

  bool operator==(const LearnerState&) const = default;
};

inline constexpr double kInitNoiseSd = 0.05;
inline constexpr double kMinInitSuccess = 0.02;
inline constexpr double kMaxInitSuccess = 0.98;
inline constexpr double kCorrectionLengthGain = 1.2;

// p_i = clamp(1 - latent_difficulty + N(0, 0.05), 0.02, 0.98). Per-level
// length means come from the corpus base_log_length; unleveled corpora use
// latent-difficulty quintiles as provisional levels.
LearnerState init_learner(const Corpus& corpus, const LearnerParams& params, std::uint64_t seed);

// Success probability of the current checkpoint for one query, after jitter.
double checkpoint_success(const LearnerState& state, QueryId query_id);

Trajectory sample_response(LearnerState& state, const QueryRecord& query);

// 1 - (1 - p) (1 - f)^gamma with f = (step - 1) / num_steps.
double guided_success_probability(double p, int step, int num_steps, double gamma);

Trajectory guided_sample(LearnerState& state, const QueryRecord& query, const Trajectory& prefix, int step,
                         int num_steps);

double correction_success_probability(double p, double kappa0, double kappa1);

Trajectory correct_response(LearnerState& state, const QueryRecord& query, const Trajectory& wrong);

// Exposure update standing in for fine-tuning on `training_set`.
LearnerState train(const LearnerState& state, const TrajectoryDataset& training_set, int K);

// Monte-Carlo pass@M from M independent draws at the query's base p.
double pass_rate(const LearnerState& state, const QueryRecord& query, int M);

// Five balanced levels by descending pass rate (ties by ascending id);
// level 1 is the easiest group.
std::map<QueryId, int> calibrate_difficulty(const std::map<QueryId, double>& pass_rates);

// SamplerHandle bound to a mutable learner state.
class LearnerSampler final : public SamplerHandle {
 public:
  explicit LearnerSampler(LearnerState& state) : state_(&state) {}

  Trajectory fresh_sample(const QueryRecord& query) override { return sample_response(*state_, query); }
  Trajectory guided_sample(const QueryRecord& query, const Trajectory& prefix, int step, int num_steps) override {
    return headtail::guided_sample(*state_, query, prefix, step, num_steps);
  }
  Trajectory correct(const QueryRecord& query, const Trajectory& wrong) override {
    return correct_response(*state_, query, wrong);
  }

 private:
  LearnerState* state_;
};

}  // namespace headtail
