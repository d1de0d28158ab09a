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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace headtail {

using QueryId = std::int64_t;

inline constexpr int kNumLevels = 5;

// A query with its ground-truth answer. latent_difficulty and base_log_length
// only exist for simulated corpora; level is filled in by difficulty calibration.
struct QueryRecord {
  QueryId id = 0;
  std::string gt_answer;
  double latent_difficulty = 0.0;
  std::optional<int> level;
  double base_log_length = 0.0;

  bool operator==(const QueryRecord&) const = default;
};

// Canonical order rank: explored < resampled_ar < resampled_gr < corrected.
enum class Origin : std::uint8_t { explored = 0, resampled_ar = 1, resampled_gr = 2, corrected = 3 };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view name);

// For corrected entries that carry the (wrong response, correction) pair.
struct CorrectionLink {
  int wrong_sample_index = 0;
  int wrong_iteration = 0;
  int wrong_length_tokens = 0;

  bool operator==(const CorrectionLink&) const = default;
};

struct Trajectory {
  QueryId query_id = 0;
  int sample_index = 1;
  int iteration = 1;
  int length_tokens = 0;
  std::vector<int> step_boundaries;
  std::string extracted_answer;
  bool correct = false;
  Origin origin = Origin::explored;
  int prefix_steps = 0;  // meaningful for resampled_gr only
  int prefix_tokens = 0;
  std::optional<CorrectionLink> pair;

  bool operator==(const Trajectory&) const = default;
};

// Throws ConfigError when a trajectory violates its structural invariants.
void validate(const Trajectory& traj);

// Strict weak order implementing the canonical dataset order.
bool canonical_less(const Trajectory& a, const Trajectory& b);

// An immutable query collection, sorted by id with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<QueryRecord> records);

  std::span<const QueryRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const QueryRecord* find(QueryId id) const;
  const QueryRecord& at(QueryId id) const;  // throws ConfigError when absent
  bool all_leveled() const;

  bool operator==(const Corpus& other) const { return records_ == other.records_; }

 private:
  std::vector<QueryRecord> records_;
};

using CorpusPtr = std::shared_ptr<const Corpus>;

inline CorpusPtr make_corpus(std::vector<QueryRecord> records) {
  return std::make_shared<const Corpus>(std::move(records));
}

}  // namespace headtail
