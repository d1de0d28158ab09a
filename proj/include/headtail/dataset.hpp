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

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "headtail/types.hpp"

namespace headtail {

enum class Role : std::uint8_t { sample, filter, discard, resample, refilter, train };

std::string_view to_string(Role role);

// Ordered multiset of trajectories over one corpus. Construction sorts the
// entries canonically and checks the role invariants; the value is immutable
// afterwards, so every transform returns a new dataset.
class TrajectoryDataset {
 public:
  TrajectoryDataset(CorpusPtr corpus, Role role, std::vector<Trajectory> entries = {});

  Role role() const { return role_; }
  const Corpus& corpus() const { return *corpus_; }
  const CorpusPtr& corpus_ptr() const { return corpus_; }
  std::span<const Trajectory> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const QueryRecord& query_of(const Trajectory& traj) const { return corpus_->at(traj.query_id); }

  TrajectoryDataset with_role(Role role) const;

  bool operator==(const TrajectoryDataset& other) const {
    return role_ == other.role_ && entries_ == other.entries_;
  }

 private:
  CorpusPtr corpus_;
  Role role_;
  std::vector<Trajectory> entries_;
};

// k_i: number of entries of `query_id` in a filter dataset.
int count_correct(const TrajectoryDataset& filtered, QueryId query_id);

// k_i for every query in the dataset; absent queries are omitted.
std::map<QueryId, int> correct_counts(const TrajectoryDataset& filtered);

// Multiset union, re-sorted canonically and tagged `train`.
TrajectoryDataset merge_datasets(const TrajectoryDataset& a, const TrajectoryDataset& b);

// Entries grouped by query id, each group in canonical order.
std::map<QueryId, std::vector<const Trajectory*>> group_by_query(const TrajectoryDataset& ds);

}  // namespace headtail
