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

#include "headtail/types.hpp"

#include <algorithm>
#include <tuple>

#include "headtail/error.hpp"

namespace headtail {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::explored: return "explored";
    case Origin::resampled_ar: return "resampled_ar";
    case Origin::resampled_gr: return "resampled_gr";
    case Origin::corrected: return "corrected";
  }
  return "explored";
}

Origin origin_from_string(std::string_view name) {
  if (name == "explored") return Origin::explored;
  if (name == "resampled_ar") return Origin::resampled_ar;
  if (name == "resampled_gr") return Origin::resampled_gr;
  if (name == "corrected") return Origin::corrected;
  throw SchemaError("unknown origin '" + std::string(name) + "'");
}

void validate(const Trajectory& t) {
  if (t.sample_index < 1) throw ConfigError("trajectory sample_index must be >= 1");
  if (t.iteration < 1) throw ConfigError("trajectory iteration must be >= 1");
  if (t.length_tokens < 0) throw ConfigError("trajectory length_tokens must be >= 0");
  if (t.prefix_tokens < 0 || t.prefix_tokens > t.length_tokens)
    throw ConfigError("trajectory prefix_tokens must lie in [0, length_tokens]");
  if (t.origin != Origin::resampled_gr && t.prefix_tokens != 0)
    throw ConfigError("only guided resamples carry a prefix");
  if (t.prefix_steps < 0) throw ConfigError("trajectory prefix_steps must be >= 0");
  int prev = -1;
  for (int b : t.step_boundaries) {
    if (b <= prev || b >= t.length_tokens)
      throw ConfigError("step boundaries must be strictly ascending and below length_tokens");
    prev = b;
  }
}

bool canonical_less(const Trajectory& a, const Trajectory& b) {
  auto key = [](const Trajectory& t) {
    return std::make_tuple(t.query_id, t.iteration, static_cast<int>(t.origin), t.sample_index,
                           t.prefix_steps, t.pair.has_value());
  };
  const auto ka = key(a), kb = key(b);
  if (ka != kb) return ka < kb;
  // Remaining fields only break ties, making the order total on content.
  auto la = a.pair.value_or(CorrectionLink{});
  auto lb = b.pair.value_or(CorrectionLink{});
  return std::tie(a.length_tokens, a.prefix_tokens, a.correct, a.extracted_answer,
                  a.step_boundaries, la.wrong_sample_index, la.wrong_iteration,
                  la.wrong_length_tokens) <
         std::tie(b.length_tokens, b.prefix_tokens, b.correct, b.extracted_answer,
                  b.step_boundaries, lb.wrong_sample_index, lb.wrong_iteration,
                  lb.wrong_length_tokens);
}

Corpus::Corpus(std::vector<QueryRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const QueryRecord& a, const QueryRecord& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& q = records_[i];
    if (i > 0 && records_[i - 1].id == q.id)
      throw ConfigError("duplicate query id " + std::to_string(q.id));
    if (!(q.latent_difficulty >= 0.0 && q.latent_difficulty <= 1.0))
      throw ConfigError("latent_difficulty of query " + std::to_string(q.id) + " outside [0,1]");
    if (q.level && (*q.level < 1 || *q.level > kNumLevels))
      throw ConfigError("level of query " + std::to_string(q.id) + " outside 1..5");
  }
}

const QueryRecord* Corpus::find(QueryId id) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), id,
                             [](const QueryRecord& q, QueryId v) { return q.id < v; });
  return it != records_.end() && it->id == id ? &*it : nullptr;
}

const QueryRecord& Corpus::at(QueryId id) const {
  if (const auto* q = find(id)) return *q;
  throw ConfigError("unknown query id " + std::to_string(id));
}

bool Corpus::all_leveled() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const QueryRecord& q) { return q.level.has_value(); });
}

}  // namespace headtail
