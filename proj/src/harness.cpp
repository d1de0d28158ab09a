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

#include "headtail/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "headtail/error.hpp"
#include "headtail/reward.hpp"
#include "headtail/rng.hpp"

namespace headtail {
namespace {

constexpr double kBaseLogLength = 5.1929568508902104;  // log(180)
constexpr double kLengthSlope = 0.6;
constexpr double kLengthNoiseSd = 0.1;

struct Targets {
  const char* name;
  double value;
};
constexpr Targets kTargets[] = {
    {"head_share_vanilla", 0.511},      {"head_share_rp", 0.248},
    {"tail_share_vanilla", 0.015},      {"tail_share_rp", 0.066},
    {"mean_len_self_generated", 277.0}, {"mean_len_original", 395.0},
    {"level5_length_reduction", 0.565}, {"level5_final_length", 136.0},
};

CorpusPtr with_levels(const Corpus& corpus, const std::map<QueryId, int>& levels) {
  std::vector<QueryRecord> records(corpus.records().begin(), corpus.records().end());
  for (auto& q : records) q.level = levels.at(q.id);
  return make_corpus(std::move(records));
}

CalibratedStart prepare(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus, const LearnerState* initial) {
  config.validate();
  if (initial) {
    if (!corpus || !corpus->all_leveled()) throw ConfigError("an explicit initial learner needs a leveled corpus");
    for (const auto& q : corpus->records())
      if (!initial->p.count(q.id)) throw ConfigError("initial learner lacks query " + std::to_string(q.id));
    return {corpus, *initial};
  }
  if (!corpus) corpus = generate_corpus(config.N, seed);
  if (corpus->empty()) throw ConfigError("corpus must not be empty");
  if (corpus->all_leveled()) return {corpus, init_learner(*corpus, config.learner, seed)};
  return calibrate_start(corpus, config.learner, config.calibration_shots, seed);
}

TrajectoryDataset explore(LearnerState& state, const CorpusPtr& corpus, int K) {
  std::vector<Trajectory> out;
  out.reserve(corpus->size() * static_cast<std::size_t>(K));
  for (const auto& q : corpus->records())
    for (int k = 1; k <= K; ++k) {
      auto t = sample_response(state, q);
      t.sample_index = k;
      out.push_back(std::move(t));
    }
  return TrajectoryDataset(corpus, Role::sample, std::move(out));
}

IterationEval evaluate(const LearnerState& state, const Corpus& corpus, int iteration, bool empty_train) {
  IterationEval e;
  e.iteration = iteration;
  e.empty_train = empty_train;
  std::size_t greedy = 0, sampled = 0;
  for (const auto& q : corpus.records()) {
    const double p = state.p.at(q.id);
    greedy += p >= 0.5 ? 1 : 0;
    KeyedRng rng(state.root_seed, StreamTag::evaluate, static_cast<std::uint64_t>(q.id),
                 static_cast<std::uint64_t>(iteration));
    sampled += rng.uniform() < p ? 1 : 0;
  }
  e.greedy_pass1 = static_cast<double>(greedy) / static_cast<double>(corpus.size());
  e.sampled_pass1 = static_cast<double>(sampled) / static_cast<double>(corpus.size());
  return e;
}

// M_{t-1} -> M_t. Under restart the update starts from M_0 but keeps the
// draw counters and the iteration clock of the current checkpoint.
LearnerState step_learner(const RunConfig& config, const LearnerState& base, const LearnerState& current,
                          const TrajectoryDataset& train_set, int K) {
  if (!config.restart_each_iteration) return train(current, train_set, K);
  LearnerState src = base;
  src.iteration = current.iteration;
  src.draw_counter = current.draw_counter;
  return train(src, train_set, K);
}

StrategyConfig strategy_for(const RunConfig& config, std::uint64_t seed, int t, int K) {
  StrategyConfig s = config.strategy;
  s.K = K;
  s.seed = mix_key({seed, static_cast<std::uint64_t>(t)});
  return s;
}

void add_rows(RunReport& r, int t, const StrategyOutcome* outcome, const TrajectoryDataset& sampled,
              const TrajectoryDataset& filtered, const std::map<QueryId, int>& counts, int K) {
  r.rows.push_back(make_metrics_row(t, sampled, counts, K));
  r.rows.push_back(make_metrics_row(t, filtered, counts, K));
  if (outcome && outcome->resampled) r.rows.push_back(make_metrics_row(t, *outcome->resampled, counts, K));
  if (outcome && outcome->refiltered) r.rows.push_back(make_metrics_row(t, *outcome->refiltered, counts, K));
}

void note_solved(std::set<QueryId>& solved, const TrajectoryDataset& filtered) {
  for (const auto& t : filtered.entries()) solved.insert(t.query_id);
}

RunReport start_report(const RunConfig& config, std::uint64_t seed) {
  RunReport r;
  r.config = config;
  r.seed = seed;
  return r;
}

void flag_empty(RunReport& r, int t, const TrajectoryDataset& train_set) {
  if (train_set.empty())
    r.warnings.push_back("iteration " + std::to_string(t) + ": empty training set, only forgetting applied");
}

}  // namespace

CorpusPtr generate_corpus(int N, std::uint64_t seed, double difficulty_exponent) {
  if (N < 1) throw ConfigError("N must be >= 1");
  KeyedRng rng(seed, StreamTag::corpus, 0);
  std::vector<double> u(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) u[i] = (i + rng.uniform()) / N;
  std::shuffle(u.begin(), u.end(), rng);
  std::normal_distribution<double> noise(0.0, kLengthNoiseSd);
  std::uniform_int_distribution<int> answer(0, 999);
  std::vector<QueryRecord> records;
  records.reserve(u.size());
  for (int i = 0; i < N; ++i) {
    QueryRecord q;
    q.id = i + 1;
    q.latent_difficulty = 1.0 - std::pow(u[i], difficulty_exponent);
    q.gt_answer = std::to_string(answer(rng));
    q.base_log_length = kBaseLogLength + kLengthSlope * q.latent_difficulty + noise(rng);
    records.push_back(std::move(q));
  }
  return make_corpus(std::move(records));
}

CalibratedStart calibrate_start(const CorpusPtr& corpus, const LearnerParams& params, int shots,
                                std::uint64_t seed) {
  const auto provisional = init_learner(*corpus, params, seed);
  std::map<QueryId, double> rates;
  for (const auto& q : corpus->records()) rates[q.id] = pass_rate(provisional, q, shots);
  auto leveled = with_levels(*corpus, calibrate_difficulty(rates));
  // Same seed, so p is unchanged; only the per-level length means move.
  return {leveled, init_learner(*leveled, params, seed)};
}

std::vector<MetricsRow> RunReport::rows_for(std::string_view role) const {
  std::vector<MetricsRow> out;
  for (const auto& r : rows)
    if (r.role == role) out.push_back(r);
  return out;
}

RunReport run_self_improvement(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus,
                               const LearnerState* initial) {
  auto start = prepare(config, seed, std::move(corpus), initial);
  RunReport r = start_report(config, seed);
  r.corpus = start.corpus;
  const auto rules = rules_for(config);
  const LearnerState base = start.learner;
  LearnerState cur = base;
  std::set<QueryId> solved;
  try {
    for (int t = 1; t <= config.T; ++t) {
      auto sampled = explore(cur, r.corpus, config.K);
      auto filtered = filter_dataset(sampled, rules);
      auto discarded = discard_dataset(sampled, rules);
      note_solved(solved, filtered);
      const auto counts = correct_counts(filtered);
      LearnerSampler sampler(cur);
      auto outcome = apply_strategy(strategy_for(config, seed, t, config.K), filtered, &discarded, &sampler, rules);
      add_rows(r, t, &outcome, sampled, filtered, counts, config.K);
      r.rows.push_back(make_metrics_row(t, outcome.train, counts, config.K));
      flag_empty(r, t, outcome.train);
      cur = step_learner(config, base, cur, outcome.train, config.K);
      r.evals.push_back(evaluate(cur, *r.corpus, t, outcome.train.empty()));
      r.train_final = std::move(outcome.train);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.complete = false;
    r.error = e.what();
  }
  r.solved_queries = solved.size();
  r.learner_final = cur;
  return r;
}

RunReport run_batch_baseline(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus,
                               const LearnerState* initial) {
  auto start = prepare(config, seed, std::move(corpus), initial);
  RunReport r = start_report(config, seed);
  r.corpus = start.corpus;
  const auto rules = rules_for(config);
  const int budget = config.K * config.T;
  LearnerState cur = start.learner;
  std::set<QueryId> solved;
  try {
    auto sampled = explore(cur, r.corpus, budget);
    auto filtered = filter_dataset(sampled, rules);
    auto discarded = discard_dataset(sampled, rules);
    note_solved(solved, filtered);
    if (filtered.empty()) r.warnings.push_back("filter set is empty");
    const auto counts = correct_counts(filtered);
    LearnerSampler sampler(cur);
    auto outcome = apply_strategy(strategy_for(config, seed, 1, budget), filtered, &discarded, &sampler, rules);
    add_rows(r, 1, &outcome, sampled, filtered, counts, budget);
    r.rows.push_back(make_metrics_row(1, outcome.train, counts, budget));
    flag_empty(r, 1, outcome.train);
    cur = train(cur, outcome.train, budget);
    r.evals.push_back(evaluate(cur, *r.corpus, 1, outcome.train.empty()));
    r.train_final = std::move(outcome.train);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.complete = false;
    r.error = e.what();
  }
  r.solved_queries = solved.size();
  r.learner_final = cur;
  return r;
}

RunReport run_iterative_union(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus,
                               const LearnerState* initial) {
  auto start = prepare(config, seed, std::move(corpus), initial);
  RunReport r = start_report(config, seed);
  r.corpus = start.corpus;
  const auto rules = rules_for(config);
  const LearnerState base = start.learner;
  LearnerState cur = base;
  std::set<QueryId> solved;
  // Resampling strategies need the checkpoint that produced the samples, so
  // they always run per iteration.
  const bool per_iteration =
      config.apply_point == ApplyPoint::per_iteration || needs_sampler(config.strategy.kind);
  std::vector<Trajectory> pooled;
  try {
    for (int t = 1; t <= config.T; ++t) {
      auto sampled = explore(cur, r.corpus, config.K);
      auto filtered = filter_dataset(sampled, rules);
      auto discarded = discard_dataset(sampled, rules);
      note_solved(solved, filtered);
      const auto counts = correct_counts(filtered);
      LearnerSampler sampler(cur);
      StrategyOutcome outcome{vanilla(filtered)};
      if (per_iteration)
        outcome = apply_strategy(strategy_for(config, seed, t, config.K), filtered, &discarded, &sampler, rules);
      add_rows(r, t, &outcome, sampled, filtered, counts, config.K);
      const auto& contribution = per_iteration ? outcome.train : filtered;
      pooled.insert(pooled.end(), contribution.entries().begin(), contribution.entries().end());
      if (t < config.T) {
        r.rows.push_back(make_metrics_row(t, outcome.train, counts, config.K));
        flag_empty(r, t, outcome.train);
        cur = step_learner(config, base, cur, outcome.train, config.K);
        r.evals.push_back(evaluate(cur, *r.corpus, t, outcome.train.empty()));
      }
    }
    const int budget = config.K * config.T;
    TrajectoryDataset union_train(r.corpus, Role::train, pooled);
    std::map<QueryId, int> union_counts;
    if (!per_iteration) {
      TrajectoryDataset union_filter(r.corpus, Role::filter, std::move(pooled));
      union_counts = correct_counts(union_filter);
      union_train = apply_strategy(strategy_for(config, seed, 0, budget), union_filter, nullptr, nullptr, rules).train;
    } else {
      for (const auto& t : union_train.entries())
        if (t.origin == Origin::explored) ++union_counts[t.query_id];
    }
    r.rows.push_back(make_metrics_row(config.T, union_train, union_counts, budget));
    flag_empty(r, config.T, union_train);
    // The final model is fit once on the union, starting from M_0.
    LearnerState src = base;
    src.iteration = cur.iteration;
    src.draw_counter = cur.draw_counter;
    cur = train(src, union_train, budget);
    r.evals.push_back(evaluate(cur, *r.corpus, config.T, union_train.empty()));
    r.train_final = std::move(union_train);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.complete = false;
    r.error = e.what();
  }
  r.solved_queries = solved.size();
  r.learner_final = cur;
  return r;
}

RunReport run_mode(const RunConfig& config, std::uint64_t seed, CorpusPtr corpus, const LearnerState* initial) {
  switch (config.mode) {
    case RunMode::self_improve: return run_self_improvement(config, seed, std::move(corpus), initial);
    case RunMode::batch_baseline: return run_batch_baseline(config, seed, std::move(corpus), initial);
    case RunMode::iterative_union: return run_iterative_union(config, seed, std::move(corpus), initial);
  }
  throw ConfigError("unknown mode");
}

Json report_summary(const RunReport& r) {
  Json evals = Json::array();
  for (const auto& e : r.evals)
    evals.push_back({{"iteration", e.iteration},
                     {"greedy_pass1", e.greedy_pass1},
                     {"sampled_pass1", e.sampled_pass1},
                     {"empty_train", e.empty_train}});
  Json targets = Json::object();
  for (const auto& t : kTargets) targets[t.name] = t.value;

  Json observed = Json::object();
  const auto filters = r.rows_for("filter");
  const auto trains = r.rows_for("train");
  if (!filters.empty() && filters.back().head_share) {
    observed["final_filter_head_share"] = *filters.back().head_share;
    observed["final_filter_tail_share"] = *filters.back().tail_share;
  }
  if (!trains.empty()) {
    if (trains.back().mean_length) observed["final_train_mean_len"] = *trains.back().mean_length;
    const auto& first = trains.front().level_mean_length[kNumLevels - 1];
    const auto& last = trains.back().level_mean_length[kNumLevels - 1];
    if (last) observed["final_train_level5_len"] = *last;
    if (first && last && *first > 0.0) observed["level5_length_reduction"] = 1.0 - *last / *first;
  }

  Json matthew = nullptr;
  if (!filters.empty() && filters.front().head_share) {
    std::vector<MetricsRow> ordered;
    for (const auto& row : filters)
      if (ordered.empty() || row.iteration > ordered.back().iteration) ordered.push_back(row);
    const auto m = matthew_series(ordered);
    matthew = {{"iterations", m.iterations}, {"head", m.head}, {"tail", m.tail}, {"gap", m.gap}};
    matthew["slope"] = m.slope ? Json(*m.slope) : Json(nullptr);
  }

  return Json{{"seed", r.seed},
              {"mode", std::string(to_string(r.config.mode))},
              {"strategy", std::string(to_string(r.config.strategy.kind))},
              {"complete", r.complete},
              {"error", r.error},
              {"warnings", r.warnings},
              {"solved_queries", r.solved_queries},
              {"eval", std::move(evals)},
              {"matthew_filter", std::move(matthew)},
              {"observed", std::move(observed)},
              {"calibration_targets", std::move(targets)}};
}

void emit_report(const RunReport& r, const std::filesystem::path& dir) {
  write_file(dir / "metrics.csv", to_csv(r.rows));
  write_file(dir / "datasets" / "train_final.jsonl", r.train_final ? dataset_snapshot(*r.train_final) : "");
  Json cfg = to_json(r.config);
  cfg["seed"] = r.seed;
  write_file(dir / "config.json", cfg.dump(2) + "\n");
  write_file(dir / "learner_final.json", (r.learner_final ? to_json(*r.learner_final) : Json::object()).dump() + "\n");
  write_file(dir / "summary.json", report_summary(r).dump(2) + "\n");
}

}  // namespace headtail
