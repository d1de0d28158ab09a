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

#include "headtail/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "headtail/error.hpp"

namespace headtail {
namespace {

int checked_level(std::optional<int> level) {
  if (!level) throw ConfigError("run calibrate_difficulty first");
  if (*level < 1 || *level > kNumLevels) throw ConfigError("level outside 1..5");
  return *level;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

LevelShares level_distribution(const TrajectoryDataset& dataset) {
  LevelShares shares{};
  for (const auto& t : dataset.entries()) shares[checked_level(dataset.query_of(t).level) - 1] += 1.0;
  if (!dataset.empty())
    for (auto& s : shares) s /= static_cast<double>(dataset.size());
  return shares;
}

LevelShares level_distribution(const TrajectoryDataset& dataset, const std::map<QueryId, int>& levels) {
  LevelShares shares{};
  for (const auto& t : dataset.entries()) {
    auto it = levels.find(t.query_id);
    shares[checked_level(it == levels.end() ? std::nullopt : std::optional<int>(it->second)) - 1] += 1.0;
  }
  if (!dataset.empty())
    for (auto& s : shares) s /= static_cast<double>(dataset.size());
  return shares;
}

std::map<double, double> accuracy_bucket_shares(const TrajectoryDataset& dataset,
                                                const std::map<QueryId, int>& counts, int K) {
  if (K < 1) throw ConfigError("K must be >= 1");
  std::map<int, std::size_t> by_k;
  for (const auto& t : dataset.entries()) {
    auto it = counts.find(t.query_id);
    ++by_k[std::min(it == counts.end() ? 0 : it->second, K)];
  }
  std::map<double, double> shares;
  for (const auto& [k, n] : by_k)
    shares[static_cast<double>(k) / K] = static_cast<double>(n) / static_cast<double>(dataset.size());
  return shares;
}

std::map<double, double> accuracy_bucket_shares(const TrajectoryDataset& filtered, int K) {
  if (filtered.role() != Role::filter && filtered.role() != Role::refilter)
    throw ConfigError("accuracy buckets need a filter dataset");
  return accuracy_bucket_shares(filtered, correct_counts(filtered), K);
}

std::array<double, 4> quarter_buckets(const std::map<double, double>& shares) {
  std::array<double, 4> out{};
  for (const auto& [ratio, share] : shares) {
    // Small epsilon so exact quarters (0.25, 0.5, ...) stay in their own column.
    const int q = std::clamp(static_cast<int>(std::ceil(4.0 * ratio - 1e-9)), 1, 4);
    out[q - 1] += share;
  }
  return out;
}

LengthStats length_stats(const TrajectoryDataset& dataset) {
  LengthStats s;
  if (dataset.empty()) return s;
  double total = 0.0;
  std::array<double, kNumLevels> sum{};
  std::array<std::size_t, kNumLevels> n{};
  for (const auto& t : dataset.entries()) {
    total += t.length_tokens;
    if (const auto& lvl = dataset.query_of(t).level; lvl && *lvl >= 1 && *lvl <= kNumLevels) {
      sum[*lvl - 1] += t.length_tokens;
      ++n[*lvl - 1];
    }
  }
  s.mean = total / static_cast<double>(dataset.size());
  for (int l = 0; l < kNumLevels; ++l)
    if (n[l]) s.per_level[l] = sum[l] / static_cast<double>(n[l]);
  return s;
}

std::optional<double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("slope needs paired samples");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

MatthewSummary matthew_series(const std::vector<MetricsRow>& rows) {
  MatthewSummary m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].iteration <= rows[i - 1].iteration)
      throw ConfigError("matthew_series needs rows in ascending iteration order");
    if (!rows[i].head_share || !rows[i].tail_share) throw ConfigError("run calibrate_difficulty first");
    m.iterations.push_back(rows[i].iteration);
    m.head.push_back(*rows[i].head_share);
    m.tail.push_back(*rows[i].tail_share);
    m.gap.push_back(*rows[i].head_share - *rows[i].tail_share);
  }
  std::vector<double> x(m.iterations.begin(), m.iterations.end());
  m.slope = least_squares_slope(x, m.gap);
  return m;
}

MetricsRow make_metrics_row(int iteration, const TrajectoryDataset& dataset, const std::map<QueryId, int>& counts,
                            int K) {
  MetricsRow row;
  row.iteration = iteration;
  row.role = std::string(to_string(dataset.role()));
  row.total = dataset.size();
  if (dataset.corpus().all_leveled()) {
    row.level_share = level_distribution(dataset);
    row.head_share = (*row.level_share)[0];
    row.tail_share = (*row.level_share)[kNumLevels - 1];
    row.matthew_gap = *row.head_share - *row.tail_share;
  }
  if (!dataset.empty()) row.bucket_share = quarter_buckets(accuracy_bucket_shares(dataset, counts, K));
  auto len = length_stats(dataset);
  row.mean_length = len.mean;
  row.level_mean_length = len.per_level;
  return row;
}

std::string csv_header() {
  return "iteration,role,total,l1,l2,l3,l4,l5,b25,b50,b75,b100,mean_len,"
         "len_l1,len_l2,len_l3,len_l4,len_l5,head,tail,gap";
}

std::string to_csv(const MetricsRow& row) {
  std::string out = std::to_string(row.iteration) + "," + row.role + "," + std::to_string(row.total);
  for (int l = 0; l < kNumLevels; ++l)
    out += "," + (row.level_share ? fmt((*row.level_share)[l]) : std::string());
  for (double b : row.bucket_share) out += "," + fmt(b);
  out += "," + fmt(row.mean_length);
  for (const auto& v : row.level_mean_length) out += "," + fmt(v);
  out += "," + fmt(row.head_share) + "," + fmt(row.tail_share) + "," + fmt(row.matthew_gap);
  return out;
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv(r) + "\n";
  return out;
}

}  // namespace headtail
