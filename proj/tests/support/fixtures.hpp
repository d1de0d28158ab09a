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

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "headtail/reward.hpp"
#include "headtail/strategies.hpp"

namespace headtail::testing {

// A query id plus its per-sample success pattern: hits[j] says whether
// sample j + 1 was correct. Lengths are per sample too.
struct QueryPattern {
  QueryId id = 0;
  std::vector<bool> hits;
  std::vector<int> lengths;
  int level = 1;
};

inline CorpusPtr corpus_for(const std::vector<QueryPattern>& qs) {
  std::vector<QueryRecord> records;
  for (const auto& q : qs) {
    QueryRecord r;
    r.id = q.id;
    r.gt_answer = "a" + std::to_string(q.id);
    r.level = q.level;
    records.push_back(r);
  }
  return make_corpus(std::move(records));
}

inline TrajectoryDataset sample_for(const CorpusPtr& corpus, const std::vector<QueryPattern>& qs, int iteration = 1) {
  std::vector<Trajectory> out;
  for (const auto& q : qs)
    for (std::size_t j = 0; j < q.hits.size(); ++j) {
      Trajectory t;
      t.query_id = q.id;
      t.sample_index = static_cast<int>(j) + 1;
      t.iteration = iteration;
      t.length_tokens = q.lengths.empty() ? 50 + static_cast<int>(j) : q.lengths[j];
      t.extracted_answer = q.hits[j] ? corpus->at(q.id).gt_answer : "wrong" + std::to_string(j);
      out.push_back(std::move(t));
    }
  return TrajectoryDataset(corpus, Role::sample, std::move(out));
}

// Patterns with exactly counts[i] correct samples among K, correct ones first.
inline std::vector<QueryPattern> patterns_from_counts(const std::vector<int>& counts, int K) {
  std::vector<QueryPattern> qs;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    QueryPattern q;
    q.id = static_cast<QueryId>(i) + 1;
    for (int j = 0; j < K; ++j) q.hits.push_back(j < counts[i]);
    q.level = static_cast<int>(i % kNumLevels) + 1;
    qs.push_back(std::move(q));
  }
  return qs;
}

// Random fixture: N queries, K samples each, random k_i and shuffled hits,
// random lengths in [1, 400].
inline std::vector<QueryPattern> random_patterns(std::mt19937_64& rng, int N, int K) {
  std::vector<QueryPattern> qs;
  std::uniform_int_distribution<int> kdist(0, K), len(1, 400), lvl(1, kNumLevels);
  std::uniform_int_distribution<QueryId> gap(1, 5);
  QueryId id = 0;
  for (int i = 0; i < N; ++i) {
    QueryPattern q;
    id += gap(rng);
    q.id = id;
    const int k = kdist(rng);
    for (int j = 0; j < K; ++j) q.hits.push_back(j < k);
    std::shuffle(q.hits.begin(), q.hits.end(), rng);
    for (int j = 0; j < K; ++j) q.lengths.push_back(len(rng));
    q.level = lvl(rng);
    qs.push_back(std::move(q));
  }
  return qs;
}

// Identity of an entry for multiset comparison.
using EntryKey = std::tuple<QueryId, int, int, int, int, int, bool>;
inline EntryKey key_of(const Trajectory& t) {
  return {t.query_id, t.iteration, static_cast<int>(t.origin), t.sample_index, t.prefix_steps, t.length_tokens,
          t.pair.has_value()};
}

inline std::vector<EntryKey> keys_of(const TrajectoryDataset& ds) {
  std::vector<EntryKey> out;
  for (const auto& t : ds.entries()) out.push_back(key_of(t));
  std::sort(out.begin(), out.end());
  return out;
}

// Sampler stub: deterministic per-query counters, success decided by a
// caller-supplied rule. Records every call.
class StubSampler : public SamplerHandle {
 public:
  std::function<bool(const QueryRecord&, std::uint64_t)> succeed = [](const QueryRecord&, std::uint64_t c) {
    return c % 2 == 0;
  };
  int correction_length = 100;
  std::size_t fresh_calls = 0, guided_calls = 0, correct_calls = 0;
  std::vector<std::pair<QueryId, int>> guided_log;  // (query, step)

  Trajectory fresh_sample(const QueryRecord& q) override {
    ++fresh_calls;
    return make(q, 60);
  }
  Trajectory guided_sample(const QueryRecord& q, const Trajectory& prefix, int step, int num_steps) override {
    ++guided_calls;
    guided_log.emplace_back(q.id, step);
    auto t = make(q, 0);
    t.prefix_tokens = step == 1 ? 0 : split_steps(prefix, num_steps)[step - 1];
    t.length_tokens = t.prefix_tokens + 40;
    return t;
  }
  Trajectory correct(const QueryRecord& q, const Trajectory&) override {
    ++correct_calls;
    return make(q, correction_length);
  }

 private:
  std::map<QueryId, std::uint64_t> counter_;
  Trajectory make(const QueryRecord& q, int length) {
    const auto c = counter_[q.id]++;
    Trajectory t;
    t.query_id = q.id;
    t.length_tokens = length;
    t.extracted_answer = succeed(q, c) ? q.gt_answer : "nope";
    return t;
  }
};

// ---- Brute-force oracles over the raw patterns ---------------------------
// Each one re-derives a strategy from its set-builder definition using only
// the pattern vectors: D_i is the list of correct sample indices of query i
// in ascending order.

inline std::vector<int> correct_indices(const QueryPattern& q) {
  std::vector<int> out;
  for (std::size_t j = 0; j < q.hits.size(); ++j)
    if (q.hits[j]) out.push_back(static_cast<int>(j) + 1);
  return out;
}

// (query, sample_index) multiset.
using Pick = std::pair<QueryId, int>;

inline std::vector<Pick> oracle_vanilla(const std::vector<QueryPattern>& qs) {
  std::vector<Pick> out;
  for (const auto& q : qs)
    for (int j : correct_indices(q)) out.emplace_back(q.id, j);
  return out;
}

inline std::vector<Pick> oracle_head_clip(const std::vector<QueryPattern>& qs, int K) {
  std::vector<Pick> out;
  for (const auto& q : qs) {
    auto d = correct_indices(q);
    if (static_cast<int>(d.size()) < K)
      for (int j : d) out.emplace_back(q.id, j);
  }
  return out;
}

// {r_{i,((k-1) mod k_i)+1} : k = 1..K, k_i >= 1}
inline std::vector<Pick> oracle_repeat_pad(const std::vector<QueryPattern>& qs, int K) {
  std::vector<Pick> out;
  for (const auto& q : qs) {
    auto d = correct_indices(q);
    const int ki = static_cast<int>(d.size());
    if (ki == 0) continue;
    for (int k = 1; k <= K; ++k) out.emplace_back(q.id, d[(k - 1) % ki]);
  }
  return out;
}

// {r_{i,((k-1) mod k_i)+1} : k = 1..K-k_i, k_i >= 1}
inline std::vector<Pick> oracle_repeat_invert(const std::vector<QueryPattern>& qs, int K) {
  std::vector<Pick> out;
  for (const auto& q : qs) {
    auto d = correct_indices(q);
    const int ki = static_cast<int>(d.size());
    if (ki == 0) continue;
    for (int k = 1; k <= K - ki; ++k) out.emplace_back(q.id, d[(k - 1) % ki]);
  }
  return out;
}

inline std::size_t oracle_ar_draws(const std::vector<QueryPattern>& qs, int K) {
  std::size_t n = 0;
  for (const auto& q : qs) n += static_cast<std::size_t>(K - static_cast<int>(correct_indices(q).size()));
  return n;
}

inline std::size_t oracle_gr_draws(const std::vector<QueryPattern>& qs, int L, int S) {
  std::size_t n = 0;
  for (const auto& q : qs) {
    auto d = correct_indices(q);
    const int ki = static_cast<int>(d.size());
    if (ki == 0 || ki >= L) continue;
    for (int j : d) {
      const int len = q.lengths.empty() ? 50 + (j - 1) : q.lengths[j - 1];
      n += len >= S ? static_cast<std::size_t>(S) : 1;
    }
  }
  return n;
}

inline std::size_t oracle_sc_attempts(const std::vector<QueryPattern>& qs, int K) {
  std::size_t n = 0;
  for (const auto& q : qs) {
    const int ki = static_cast<int>(correct_indices(q).size());
    if (ki < K) n += q.hits.size() - static_cast<std::size_t>(ki);
  }
  return n;
}

inline std::vector<Pick> picks_of(const TrajectoryDataset& ds) {
  std::vector<Pick> out;
  for (const auto& t : ds.entries()) out.emplace_back(t.query_id, t.sample_index);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Pick> sorted(std::vector<Pick> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace headtail::testing
