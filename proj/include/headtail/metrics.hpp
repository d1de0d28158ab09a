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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "headtail/dataset.hpp"

namespace headtail {

using LevelShares = std::array<double, kNumLevels>;

// Summary line of one dataset at one iteration. Optional fields are left
// blank in the CSV: level columns when the corpus is unleveled, length
// columns for empty groups.
struct MetricsRow {
  int iteration = 0;
  std::string role;
  std::size_t total = 0;
  std::optional<LevelShares> level_share;
  std::array<double, 4> bucket_share{};  // 25%, 50%, 75%, 100%
  std::optional<double> mean_length;
  std::array<std::optional<double>, kNumLevels> level_mean_length{};
  std::optional<double> head_share;
  std::optional<double> tail_share;
  std::optional<double> matthew_gap;

  bool operator==(const MetricsRow&) const = default;
};

// Entry share per level (index 0 = level 1). Empty datasets give all zeros.
// Throws ConfigError("run calibrate_difficulty first") on an unleveled query.
LevelShares level_distribution(const TrajectoryDataset& dataset);
LevelShares level_distribution(const TrajectoryDataset& dataset, const std::map<QueryId, int>& levels);

// Entry-weighted share keyed by k_i / K, with k_i taken from `counts`
// (queries absent there count as k_i = 0). Ratios above 1 are clamped.
std::map<double, double> accuracy_bucket_shares(const TrajectoryDataset& dataset,
                                                const std::map<QueryId, int>& counts, int K);
// k_i from the filter dataset itself.
std::map<double, double> accuracy_bucket_shares(const TrajectoryDataset& filtered, int K);

// Folds k_i/K ratios onto the four quarter columns: ceil(4 r) / 4, with r = 0
// landing in the 25% column.
std::array<double, 4> quarter_buckets(const std::map<double, double>& shares);

struct LengthStats {
  std::optional<double> mean;
  std::array<std::optional<double>, kNumLevels> per_level{};
};
LengthStats length_stats(const TrajectoryDataset& dataset);

struct MatthewSummary {
  std::vector<int> iterations;
  std::vector<double> head;
  std::vector<double> tail;
  std::vector<double> gap;
  std::optional<double> slope;  // least-squares gap slope per iteration
};
// Rows must have strictly ascending iterations and level shares.
MatthewSummary matthew_series(const std::vector<MetricsRow>& rows);

std::optional<double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

MetricsRow make_metrics_row(int iteration, const TrajectoryDataset& dataset, const std::map<QueryId, int>& counts,
                            int K);

inline constexpr std::size_t kCsvColumns = 21;
std::string csv_header();
std::string to_csv(const MetricsRow& row);
std::string to_csv(const std::vector<MetricsRow>& rows);  // header plus rows, LF endings

}  // namespace headtail
