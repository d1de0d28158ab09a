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

#include "headtail/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "headtail/error.hpp"
#include "headtail/rng.hpp"

namespace headtail {
namespace {

int level_index(const QueryRecord& q) { return q.level ? *q.level - 1 : kNumLevels / 2; }

double sample_p(const LearnerState& state, QueryId id) {
  auto it = state.p.find(id);
  if (it == state.p.end()) throw ConfigError("unknown query " + std::to_string(id));
  return it->second;
}

std::uint64_t next_counter(LearnerState& state, QueryId id) { return state.draw_counter[id]++; }

int draw_length(KeyedRng& rng, double log_mean, double sigma) {
  std::normal_distribution<double> normal(log_mean, sigma);
  const double tokens = std::exp(normal(rng));
  return std::max(1, static_cast<int>(std::lround(std::min(tokens, 1e9))));
}

std::string wrong_answer(const QueryRecord& q, std::uint64_t counter) {
  // The leading "¬" keeps the answer from ever normalizing onto the truth.
  return "¬" + q.gt_answer + "#" + std::to_string(counter);
}

}  // namespace

void LearnerParams::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!(learn_rate > 0.0 && learn_rate <= 1.0)) throw ConfigError("learn_rate must lie in (0, 1]");
  if (!(forget_rate >= 0.0 && forget_rate < 1.0)) throw ConfigError("forget_rate must lie in [0, 1)");
  if (!in(length_imitation, 0.0, 1.0)) throw ConfigError("length_imitation must lie in [0, 1]");
  if (!(prefix_gain > 0.0)) throw ConfigError("prefix_gain must be > 0");
  if (!in(correction_base, 0.0, 1.0) || !in(correction_slope, 0.0, 1.0))
    throw ConfigError("correction_base and correction_slope must lie in [0, 1]");
  if (!(sigma_log_len > 0.0)) throw ConfigError("sigma_log_len must be > 0");
  if (!(session_concentration >= 0.0)) throw ConfigError("session_concentration must be >= 0");
}

LearnerState init_learner(const Corpus& corpus, const LearnerParams& params, std::uint64_t seed) {
  if (corpus.empty()) throw ConfigError("init_learner requires a non-empty corpus");
  params.validate();
  LearnerState state;
  state.params = params;
  state.root_seed = seed;

  auto records = corpus.records();
  for (const auto& q : records) {
    KeyedRng rng(seed, StreamTag::init, static_cast<std::uint64_t>(q.id));
    std::normal_distribution<double> noise(0.0, kInitNoiseSd);
    state.p[q.id] = std::clamp(1.0 - q.latent_difficulty + noise(rng), kMinInitSuccess, kMaxInitSuccess);
  }

  std::vector<int> level(records.size());
  if (corpus.all_leveled()) {
    for (std::size_t i = 0; i < records.size(); ++i) level[i] = *records[i].level - 1;
  } else {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return records[a].latent_difficulty < records[b].latent_difficulty;
    });
    for (std::size_t r = 0; r < order.size(); ++r)
      level[order[r]] = static_cast<int>(r * kNumLevels / order.size());
  }
  std::array<double, kNumLevels> sum{};
  std::array<int, kNumLevels> n{};
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sum[level[i]] += records[i].base_log_length;
    ++n[level[i]];
    total += records[i].base_log_length;
  }
  for (int l = 0; l < kNumLevels; ++l)
    state.mu_log_len[l] = n[l] ? sum[l] / n[l] : total / static_cast<double>(records.size());
  return state;
}

double checkpoint_success(const LearnerState& state, QueryId query_id) {
  const double p = sample_p(state, query_id);
  const double c = state.params.session_concentration;
  if (c <= 0.0 || p <= 0.0 || p >= 1.0) return p;
  KeyedRng rng(state.root_seed, StreamTag::session, static_cast<std::uint64_t>(query_id),
               static_cast<std::uint64_t>(state.iteration));
  std::gamma_distribution<double> ga(p * c, 1.0), gb((1.0 - p) * c, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : p;
}

Trajectory sample_response(LearnerState& state, const QueryRecord& query) {
  const double p = checkpoint_success(state, query.id);
  const auto counter = next_counter(state, query.id);
  KeyedRng rng(state.root_seed, StreamTag::sample, static_cast<std::uint64_t>(query.id), counter);
  Trajectory t;
  t.query_id = query.id;
  t.iteration = state.iteration + 1;
  t.correct = rng.uniform() < p;
  t.length_tokens = draw_length(rng, state.mu_log_len[level_index(query)], state.params.sigma_log_len);
  t.extracted_answer = t.correct ? query.gt_answer : wrong_answer(query, counter);
  return t;
}

double guided_success_probability(double p, int step, int num_steps, double gamma) {
  if (num_steps < 1 || step < 1 || step > num_steps) throw ConfigError("guided step outside 1..S");
  const double f = static_cast<double>(step - 1) / num_steps;
  // Same value as 1 - (1 - p)(1 - f)^gamma, written as p plus a non-negative
  // term so rounding can never push it below p.
  return std::min(1.0, p + (1.0 - p) * (1.0 - std::pow(1.0 - f, gamma)));
}

Trajectory guided_sample(LearnerState& state, const QueryRecord& query, const Trajectory& prefix, int step,
                         int num_steps) {
  if (!prefix.correct) throw ConfigError("guided sampling requires a successful prefix");
  if (prefix.query_id != query.id) throw ConfigError("guided prefix belongs to another query");
  if (num_steps < 2 || step < 1 || step > num_steps) throw ConfigError("guided step outside 1..S");
  const int prefix_tokens = step == 1 ? 0 : split_steps(prefix, num_steps)[step - 1];
  const double f = static_cast<double>(step - 1) / num_steps;
  const double p = guided_success_probability(checkpoint_success(state, query.id), step, num_steps,
                                              state.params.prefix_gain);
  const auto counter = next_counter(state, query.id);
  KeyedRng rng(state.root_seed, StreamTag::guided, static_cast<std::uint64_t>(query.id), counter);
  Trajectory t;
  t.query_id = query.id;
  t.iteration = state.iteration + 1;
  t.origin = Origin::resampled_gr;
  t.prefix_steps = step - 1;
  t.prefix_tokens = prefix_tokens;
  t.correct = rng.uniform() < p;
  const double log_mean = state.mu_log_len[level_index(query)] + std::log(1.0 - f);
  t.length_tokens = prefix_tokens + draw_length(rng, log_mean, state.params.sigma_log_len);
  t.extracted_answer = t.correct ? query.gt_answer : wrong_answer(query, counter);
  return t;
}

double correction_success_probability(double p, double kappa0, double kappa1) {
  return std::clamp(kappa0 + kappa1 * p, 0.0, 1.0);
}

Trajectory correct_response(LearnerState& state, const QueryRecord& query, const Trajectory& wrong) {
  if (wrong.correct) throw ConfigError("correction expects an incorrect trajectory");
  const double p = correction_success_probability(checkpoint_success(state, query.id),
                                                  state.params.correction_base, state.params.correction_slope);
  const auto counter = next_counter(state, query.id);
  KeyedRng rng(state.root_seed, StreamTag::correct, static_cast<std::uint64_t>(query.id), counter);
  Trajectory t;
  t.query_id = query.id;
  t.iteration = wrong.iteration;
  t.sample_index = wrong.sample_index;
  t.origin = Origin::corrected;
  t.correct = rng.uniform() < p;
  const double log_mean = state.mu_log_len[level_index(query)] + std::log(kCorrectionLengthGain);
  t.length_tokens = draw_length(rng, log_mean, state.params.sigma_log_len);
  t.extracted_answer = t.correct ? query.gt_answer : wrong_answer(query, counter);
  t.pair = CorrectionLink{wrong.sample_index, wrong.iteration, wrong.length_tokens};
  return t;
}

LearnerState train(const LearnerState& state, const TrajectoryDataset& training_set, int K) {
  if (training_set.role() != Role::train) throw ConfigError("train expects a train dataset");
  if (K < 1) throw ConfigError("K must be >= 1");
  const auto& prm = state.params;
  std::map<QueryId, int> exposure;
  std::array<double, kNumLevels> log_sum{};
  std::array<int, kNumLevels> n{};
  double log_total = 0.0;
  for (const auto& t : training_set.entries()) {
    if (!state.p.count(t.query_id)) throw ConfigError("train entry for unknown query " + std::to_string(t.query_id));
    ++exposure[t.query_id];
    const double ll = std::log(std::max(1, t.length_tokens));
    log_total += ll;
    if (const auto& lvl = training_set.query_of(t).level) {
      log_sum[*lvl - 1] += ll;
      ++n[*lvl - 1];
    }
  }

  LearnerState next = state;
  for (auto& [id, p] : next.p) {
    auto it = exposure.find(id);
    if (it == exposure.end()) {
      p = (1.0 - prm.forget_rate) * p;
    } else {
      const double share = std::min(static_cast<double>(it->second) / K, 1.0);
      p = p + prm.learn_rate * share * (1.0 - p);
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  if (!training_set.empty()) {
    const double global = log_total / static_cast<double>(training_set.size());
    for (int l = 0; l < kNumLevels; ++l) {
      const double target = n[l] ? log_sum[l] / n[l] : global;
      next.mu_log_len[l] = (1.0 - prm.length_imitation) * next.mu_log_len[l] + prm.length_imitation * target;
    }
  }
  ++next.iteration;
  return next;
}

double pass_rate(const LearnerState& state, const QueryRecord& query, int M) {
  if (M < 1) throw ConfigError("pass_rate needs M >= 1");
  const double p = sample_p(state, query.id);
  KeyedRng rng(state.root_seed, StreamTag::calibrate, static_cast<std::uint64_t>(query.id),
               static_cast<std::uint64_t>(state.iteration));
  int hits = 0;
  for (int j = 0; j < M; ++j) hits += rng.uniform() < p ? 1 : 0;
  return static_cast<double>(hits) / M;
}

std::map<QueryId, int> calibrate_difficulty(const std::map<QueryId, double>& pass_rates) {
  if (pass_rates.empty()) throw ConfigError("calibrate_difficulty needs at least one query");
  std::vector<std::pair<QueryId, double>> order(pass_rates.begin(), pass_rates.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t n = order.size();
  std::map<QueryId, int> levels;
  std::size_t pos = 0;
  for (int l = 0; l < kNumLevels; ++l) {
    const std::size_t size = n / kNumLevels + (static_cast<std::size_t>(l) < n % kNumLevels ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j) levels[order[pos++].first] = l + 1;
  }
  return levels;
}

}  // namespace headtail
