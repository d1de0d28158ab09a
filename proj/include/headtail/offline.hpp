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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "headtail/metrics.hpp"
#include "headtail/reward.hpp"
#include "headtail/strategies.hpp"

namespace headtail {

// One line of an offline sampling log.
struct TrajectoryLogRecord {
  QueryId query_id = 0;
  std::string gt_answer;
  std::string extracted_answer;
  int token_count = 0;
  std::vector<int> step_offsets;
  std::optional<int> iteration;
  std::optional<int> level;
};

// Throws SchemaError citing `line` on a malformed record. Unknown keys are
// ignored so richer logs pass through.
TrajectoryLogRecord parse_log_record(std::string_view text, std::size_t line);
std::vector<TrajectoryLogRecord> read_log(const std::filesystem::path& path);

struct OfflineOptions {
  StrategyConfig strategy;            // reshaping kinds only
  int min_cot_tokens = 0;             // 0 disables the CoT floor
  AnswerNormalizationRules rules = default_rules();
};

struct OfflineSummary {
  std::size_t records_in = 0;
  std::size_t queries = 0;
  std::size_t correct = 0;
  std::size_t records_out = 0;
  MetricsRow row;  // of the written training set
};

// Corpus and sample dataset built from log records: one query per distinct
// query_id, sample_index counting that query's records per iteration.
TrajectoryDataset log_to_dataset(const std::vector<TrajectoryLogRecord>& records);

// In-memory core of rebalance_offline.
TrajectoryDataset rebalance_records(const std::vector<TrajectoryLogRecord>& records, const OfflineOptions& options,
                                    OfflineSummary* summary = nullptr);

// Reads `input`, writes the rebalanced JSONL to `output` and the summary row
// to `output` + ".metrics.csv". Nothing is written when any step fails.
OfflineSummary rebalance_offline(const std::filesystem::path& input, const OfflineOptions& options,
                                 const std::filesystem::path& output);

std::string to_jsonl(const TrajectoryDataset& dataset);

}  // namespace headtail
