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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "headtail/config.hpp"
#include "headtail/metrics.hpp"

namespace headtail {

// Synthetic corpus of N queries with ids 1..N. Difficulties are stratified
// over [0, 1] and skewed toward easy queries; base_log_length grows with
// difficulty. Queries are unleveled.
CorpusPtr generate_corpus(int N, std::uint64_t seed, double difficulty_exponent = 0.7);

struct CalibratedStart {
  CorpusPtr corpus;        // levels filled in
  LearnerState learner;    // M_0, length means taken per calibrated level
};
// Levels from pass@M of the initial learner, frozen for the whole run.
CalibratedStart calibrate_start(const CorpusPtr& corpus, const LearnerParams& params, int shots,
                                std::uint64_t seed);

struct IterationEval {
  int iteration = 0;
  double greedy_pass1 = 0.0;   // share of queries with p >= 0.5
  double sampled_pass1 = 0.0;  // one held-out draw per query
  bool empty_train = false;
  bool operator==(const IterationEval&) const = default;
};

struct RunReport {
  RunConfig config;
  std::uint64_t seed = 0;
  CorpusPtr corpus;
  std::vector<MetricsRow> rows;
  std::vector<IterationEval> evals;
  std::optional<TrajectoryDataset> train_final;
  std::optional<LearnerState> learner_final;
  std::size_t solved_queries = 0;  // distinct queries with a correct sample
  std::vector<std::string> warnings;
  bool complete = true;
  std::string error;

  // Rows of one role, in iteration order.
  std::vector<MetricsRow> rows_for(std::string_view role) const;
};

// Each mode validates the config before any work. `corpus` overrides the
// generated one; unleveled corpora are calibrated first. `initial` replaces
// the calibrated M_0 (the corpus must then be given and leveled).
RunReport run_self_improvement(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus = nullptr,
                               const LearnerState* initial = nullptr);
RunReport run_batch_baseline(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus = nullptr,
                             const LearnerState* initial = nullptr);
RunReport run_iterative_union(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus = nullptr,
                              const LearnerState* initial = nullptr);
RunReport run_mode(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus = nullptr,
                   const LearnerState* initial = nullptr);

// Writes metrics.csv, datasets/train_final.jsonl, config.json,
// learner_final.json and summary.json under `dir`.
void emit_report(const RunReport& report, const std::filesystem::path& dir);
Json report_summary(const RunReport& report);

}  // namespace headtail
