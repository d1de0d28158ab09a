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

#include "headtail/dataset.hpp"

#include <algorithm>

#include "headtail/error.hpp"

namespace headtail {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::sample: return "sample";
    case Role::filter: return "filter";
    case Role::discard: return "discard";
    case Role::resample: return "resample";
    case Role::refilter: return "refilter";
    case Role::train: return "train";
  }
  return "sample";
}

TrajectoryDataset::TrajectoryDataset(CorpusPtr corpus, Role role, std::vector<Trajectory> entries)
    : corpus_(std::move(corpus)), role_(role), entries_(std::move(entries)) {
  if (!corpus_) throw ConfigError("dataset requires a corpus");
  for (const auto& t : entries_) {
    validate(t);
    if (!corpus_->find(t.query_id))
      throw ConfigError("trajectory references query " + std::to_string(t.query_id) +
                        " outside the corpus");
    if (role_ == Role::filter && !t.correct)
      throw ConfigError("filter dataset entries must be correct");
    if (role_ == Role::discard && t.correct)
      throw ConfigError("discard dataset entries must be incorrect");
  }
  std::stable_sort(entries_.begin(), entries_.end(), canonical_less);
}

TrajectoryDataset TrajectoryDataset::with_role(Role role) const {
  return TrajectoryDataset(corpus_, role, entries_);
}

int count_correct(const TrajectoryDataset& filtered, QueryId query_id) {
  if (filtered.role() != Role::filter) throw ConfigError("count_correct expects a filter dataset");
  auto entries = filtered.entries();
  // Entries are sorted by query id first, so the query's run is contiguous.
  auto lo = std::lower_bound(entries.begin(), entries.end(), query_id,
                             [](const Trajectory& t, QueryId id) { return t.query_id < id; });
  auto hi = std::upper_bound(lo, entries.end(), query_id,
                             [](QueryId id, const Trajectory& t) { return id < t.query_id; });
  return static_cast<int>(hi - lo);
}

std::map<QueryId, int> correct_counts(const TrajectoryDataset& filtered) {
  if (filtered.role() != Role::filter) throw ConfigError("correct_counts expects a filter dataset");
  std::map<QueryId, int> counts;
  for (const auto& t : filtered.entries()) ++counts[t.query_id];
  return counts;
}

TrajectoryDataset merge_datasets(const TrajectoryDataset& a, const TrajectoryDataset& b) {
  if (a.corpus_ptr() != b.corpus_ptr() && !(a.corpus() == b.corpus()))
    throw ConfigError("corpus mismatch");
  std::vector<Trajectory> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.entries().begin(), a.entries().end());
  all.insert(all.end(), b.entries().begin(), b.entries().end());
  return TrajectoryDataset(a.corpus_ptr(), Role::train, std::move(all));
}

std::map<QueryId, std::vector<const Trajectory*>> group_by_query(const TrajectoryDataset& ds) {
  std::map<QueryId, std::vector<const Trajectory*>> groups;
  for (const auto& t : ds.entries()) groups[t.query_id].push_back(&t);
  return groups;
}

}  // namespace headtail
