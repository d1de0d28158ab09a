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

#include "headtail/strategies.hpp"

#include <numeric>

#include "headtail/error.hpp"
#include "headtail/rng.hpp"

namespace headtail {
namespace {

void require_filter(const TrajectoryDataset& ds, std::string_view op) {
  if (ds.role() != Role::filter)
    throw ConfigError(std::string(op) + " expects a filter dataset, got " + std::string(to_string(ds.role())));
}

std::uint64_t uniform_below(KeyedRng& rng, std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = KeyedRng::max() - KeyedRng::max() % n;
  std::uint64_t x;
  do x = rng(); while (x >= limit);
  return x % n;
}

// Canonical-order cycle of `group` stretched (or cut) to `target` entries.
void append_cycle(std::vector<Trajectory>& out, const std::vector<const Trajectory*>& group, int target) {
  const int k = static_cast<int>(group.size());
  for (int j = 1; j <= target; ++j) out.push_back(*group[(j - 1) % k]);
}

template <class Fn>
Trajectory guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SamplerError&) {
    throw;
  } catch (const std::exception& e) {
    throw SamplerError(std::string("sampler error: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::vanilla: return "vanilla";
    case StrategyKind::tc: return "tc";
    case StrategyKind::hc: return "hc";
    case StrategyKind::rp: return "rp";
    case StrategyKind::ri: return "ri";
    case StrategyKind::ar: return "ar";
    case StrategyKind::gr: return "gr";
    case StrategyKind::sc: return "sc";
  }
  return "vanilla";
}

StrategyKind strategy_from_string(std::string_view name) {
  for (auto k : {StrategyKind::vanilla, StrategyKind::tc, StrategyKind::hc, StrategyKind::rp,
                 StrategyKind::ri, StrategyKind::ar, StrategyKind::gr, StrategyKind::sc})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

bool needs_sampler(StrategyKind kind) {
  return kind == StrategyKind::ar || kind == StrategyKind::gr || kind == StrategyKind::sc;
}

void StrategyConfig::validate() const {
  if (K < 1) throw ConfigError("K must be >= 1");
  if (L < 1) throw ConfigError("L must be >= 1");
  if (L > K) throw ConfigError("L must not exceed K");
  if (S < 2) throw ConfigError("S must be >= 2");
  if (min_cot_tokens < 0) throw ConfigError("min_cot_tokens must be >= 0");
}

TrajectoryDataset vanilla(const TrajectoryDataset& filtered) {
  require_filter(filtered, "vanilla");
  return filtered.with_role(Role::train);
}

TrajectoryDataset threshold_clip(const TrajectoryDataset& filtered, int L, std::uint64_t seed) {
  require_filter(filtered, "threshold_clip");
  if (L < 1) throw ConfigError("L must be >= 1");
  std::vector<Trajectory> out;
  for (const auto& [qid, group] : group_by_query(filtered)) {
    const int k = static_cast<int>(group.size());
    if (k <= L) {
      for (const auto* t : group) out.push_back(*t);
      continue;
    }
    // Partial Fisher-Yates: the first L slots end up a uniform L-subset.
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    KeyedRng rng(seed, StreamTag::truncate, static_cast<std::uint64_t>(qid));
    for (int j = 0; j < L; ++j) {
      const int pick = j + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(k - j)));
      std::swap(idx[j], idx[pick]);
    }
    for (int j = 0; j < L; ++j) out.push_back(*group[idx[j]]);
  }
  return TrajectoryDataset(filtered.corpus_ptr(), Role::train, std::move(out));
}

TrajectoryDataset head_clip(const TrajectoryDataset& filtered, int K) {
  require_filter(filtered, "head_clip");
  if (K < 1) throw ConfigError("K must be >= 1");
  std::vector<Trajectory> out;
  for (const auto& [qid, group] : group_by_query(filtered)) {
    // Logs may hold more than K correct records per query; those are head too.
    if (static_cast<int>(group.size()) >= K) continue;
    for (const auto* t : group) out.push_back(*t);
  }
  return TrajectoryDataset(filtered.corpus_ptr(), Role::train, std::move(out));
}

TrajectoryDataset repeat_pad(const TrajectoryDataset& filtered, int K) {
  require_filter(filtered, "repeat_pad");
  if (K < 1) throw ConfigError("K must be >= 1");
  std::vector<Trajectory> out;
  for (const auto& [qid, group] : group_by_query(filtered)) append_cycle(out, group, K);
  return TrajectoryDataset(filtered.corpus_ptr(), Role::train, std::move(out));
}

TrajectoryDataset repeat_invert(const TrajectoryDataset& filtered, int K) {
  require_filter(filtered, "repeat_invert");
  if (K < 1) throw ConfigError("K must be >= 1");
  std::vector<Trajectory> out;
  for (const auto& [qid, group] : group_by_query(filtered)) {
    const int k = static_cast<int>(group.size());
    const int target = K - k;
    if (target <= 0) continue;
    // With k >= target the cycle never wraps, so it is the canonical prefix.
    append_cycle(out, group, target);
  }
  return TrajectoryDataset(filtered.corpus_ptr(), Role::train, std::move(out));
}

ResampleResult adaptive_resample(const TrajectoryDataset& filtered, SamplerHandle& sampler, int K,
                                 const AnswerNormalizationRules& rules) {
  require_filter(filtered, "adaptive_resample");
  if (K < 1) throw ConfigError("K must be >= 1");
  const auto counts = correct_counts(filtered);
  std::vector<Trajectory> drawn;
  for (const auto& q : filtered.corpus().records()) {
    auto it = counts.find(q.id);
    const int k = it == counts.end() ? 0 : it->second;
    for (int j = 1; j <= K - k; ++j) {
      Trajectory t = guarded([&] { return sampler.fresh_sample(q); });
      t.origin = Origin::resampled_ar;
      t.sample_index = j;
      t.prefix_steps = 0;
      t.prefix_tokens = 0;
      drawn.push_back(std::move(t));
    }
  }
  TrajectoryDataset resampled(filtered.corpus_ptr(), Role::resample, std::move(drawn));
  TrajectoryDataset refiltered = filter_dataset(resampled, rules);
  TrajectoryDataset train = merge_datasets(filtered, refiltered);
  return {std::move(resampled), std::move(refiltered), std::move(train)};
}

std::vector<int> split_steps(const Trajectory& traj, int S) {
  if (S < 2) throw ConfigError("S must be >= 2");
  if (traj.length_tokens < S) throw ConfigError("trajectory too short to split");
  const int base = traj.length_tokens / S;
  const int extra = traj.length_tokens % S;
  std::vector<int> prefixes(S);
  int offset = 0;
  for (int s = 0; s < S; ++s) {
    prefixes[s] = offset;
    offset += base + (s < extra ? 1 : 0);
  }
  return prefixes;
}

ResampleResult guided_resample(const TrajectoryDataset& filtered, SamplerHandle& sampler, int L, int S,
                               const AnswerNormalizationRules& rules) {
  require_filter(filtered, "guided_resample");
  if (L < 1) throw ConfigError("L must be >= 1");
  if (S < 2) throw ConfigError("S must be >= 2");
  std::vector<Trajectory> drawn;
  for (const auto& [qid, group] : group_by_query(filtered)) {
    if (static_cast<int>(group.size()) >= L) continue;
    const QueryRecord& q = filtered.query_of(*group.front());
    int index = 0;
    for (const auto* source : group) {
      // Too-short trajectories only get the empty-prefix draw.
      const int steps = source->length_tokens >= S ? S : 1;
      for (int s = 1; s <= steps; ++s) {
        Trajectory t = guarded([&] { return sampler.guided_sample(q, *source, s, S); });
        t.origin = Origin::resampled_gr;
        t.prefix_steps = s - 1;
        t.sample_index = ++index;
        drawn.push_back(std::move(t));
      }
    }
  }
  TrajectoryDataset resampled(filtered.corpus_ptr(), Role::resample, std::move(drawn));
  TrajectoryDataset refiltered = filter_dataset(resampled, rules);
  TrajectoryDataset train = merge_datasets(filtered, refiltered);
  return {std::move(resampled), std::move(refiltered), std::move(train)};
}

SelfCorrectResult self_correct_augment(const TrajectoryDataset& filtered, const TrajectoryDataset& discard,
                                       SamplerHandle& sampler, int K, int min_cot_tokens,
                                       const AnswerNormalizationRules& rules) {
  require_filter(filtered, "self_correct_augment");
  if (discard.role() != Role::discard) throw ConfigError("self_correct_augment expects a discard dataset");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (min_cot_tokens < 0) throw ConfigError("min_cot_tokens must be >= 0");
  if (filtered.corpus_ptr() != discard.corpus_ptr() && !(filtered.corpus() == discard.corpus()))
    throw ConfigError("corpus mismatch");
  const auto counts = correct_counts(filtered);
  SelfCorrectResult result{filtered.with_role(Role::train)};
  std::vector<Trajectory> kept;
  for (const auto& wrong : discard.entries()) {
    auto it = counts.find(wrong.query_id);
    const int k = it == counts.end() ? 0 : it->second;
    if (k >= K) continue;
    const QueryRecord& q = discard.query_of(wrong);
    Trajectory fixed = guarded([&] { return sampler.correct(q, wrong); });
    ++result.attempts;
    if (reward(q, fixed.extracted_answer, rules) != 1) continue;
    if (fixed.length_tokens - fixed.prefix_tokens < min_cot_tokens) continue;
    fixed.origin = Origin::corrected;
    fixed.correct = true;
    fixed.sample_index = wrong.sample_index;
    fixed.iteration = wrong.iteration;
    fixed.prefix_steps = 0;
    fixed.prefix_tokens = 0;
    fixed.pair.reset();
    Trajectory paired = fixed;
    paired.pair = CorrectionLink{wrong.sample_index, wrong.iteration, wrong.length_tokens};
    kept.push_back(std::move(fixed));
    kept.push_back(std::move(paired));
    ++result.kept;
  }
  TrajectoryDataset corrections(filtered.corpus_ptr(), Role::refilter, std::move(kept));
  result.train = merge_datasets(filtered, corrections);
  return result;
}

StrategyOutcome apply_strategy(const StrategyConfig& config, const TrajectoryDataset& filtered,
                               const TrajectoryDataset* discard, SamplerHandle* sampler,
                               const AnswerNormalizationRules& rules) {
  config.validate();
  if (needs_sampler(config.kind) && !sampler)
    throw ConfigError("strategy requires a sampler; offline mode supports reshaping only");
  switch (config.kind) {
    case StrategyKind::vanilla: return {vanilla(filtered)};
    case StrategyKind::tc: return {threshold_clip(filtered, config.L, config.seed)};
    case StrategyKind::hc: return {head_clip(filtered, config.K)};
    case StrategyKind::rp: return {repeat_pad(filtered, config.K)};
    case StrategyKind::ri: return {repeat_invert(filtered, config.K)};
    case StrategyKind::ar:
    case StrategyKind::gr: {
      auto r = config.kind == StrategyKind::ar
                   ? adaptive_resample(filtered, *sampler, config.K, rules)
                   : guided_resample(filtered, *sampler, config.L, config.S, rules);
      StrategyOutcome out{std::move(r.train), r.resampled.size()};
      out.resampled = std::move(r.resampled);
      out.refiltered = std::move(r.refiltered);
      return out;
    }
    case StrategyKind::sc: {
      if (!discard) throw ConfigError("self-correction requires the discard dataset");
      auto r = self_correct_augment(filtered, *discard, *sampler, config.K, config.min_cot_tokens, rules);
      return {std::move(r.train), r.attempts};
    }
  }
  throw ConfigError("unhandled strategy");
}

}  // namespace headtail
