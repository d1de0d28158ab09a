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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "../support/fixtures.hpp"
#include "headtail/error.hpp"
#include "headtail/harness.hpp"
#include "headtail/offline.hpp"

using namespace headtail;
using namespace headtail::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: strategy-oracle equivalence ----------------------------------------
Outcome strategy_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> n_dist(0, 50);
  std::size_t failures = 0;
  const int L = 4, S = 4;
  for (int rep = 0; rep < 1000; ++rep) {
    const int K = std::array{4, 8, 16}[rep % 3];
    auto qs = random_patterns(rng, n_dist(rng), K);
    auto corpus = corpus_for(qs);
    auto sampled = sample_for(corpus, qs);
    auto filtered = filter_dataset(sampled, default_rules());
    auto discarded = discard_dataset(sampled, default_rules());

    // TC: per query, a duplicate-free subset of D_i with min(k_i, L) entries.
    auto tc = picks_of(threshold_clip(filtered, L, rng()));
    std::map<QueryId, std::vector<int>> tc_by;
    for (const auto& [q, j] : tc) tc_by[q].push_back(j);
    for (const auto& q : qs) {
      auto d = correct_indices(q);
      auto& got = tc_by[q.id];
      if (got.size() != std::min<std::size_t>(d.size(), L)) ++failures;
      if (std::set<int>(got.begin(), got.end()).size() != got.size()) ++failures;
      for (int j : got)
        if (std::find(d.begin(), d.end(), j) == d.end()) ++failures;
    }
    if (picks_of(head_clip(filtered, K)) != sorted(oracle_head_clip(qs, K))) ++failures;
    if (picks_of(repeat_pad(filtered, K)) != sorted(oracle_repeat_pad(qs, K))) ++failures;
    if (picks_of(repeat_invert(filtered, K)) != sorted(oracle_repeat_invert(qs, K))) ++failures;

    StubSampler ar_s, gr_s, sc_s;
    auto ar = adaptive_resample(filtered, ar_s, K, default_rules());
    if (ar_s.fresh_calls != oracle_ar_draws(qs, K) || ar.resampled.size() != ar_s.fresh_calls) ++failures;
    guided_resample(filtered, gr_s, L, S, default_rules());
    if (gr_s.guided_calls != oracle_gr_draws(qs, L, S)) ++failures;
    auto sc = self_correct_augment(filtered, discarded, sc_s, K, kDefaultMinCotTokens, default_rules());
    if (sc_s.correct_calls != oracle_sc_attempts(qs, K) || sc.attempts != sc_s.correct_calls) ++failures;
  }
  const double dt = seconds_since(t0);
  return {failures == 0 && dt < 10.0, fmt("1000 fixtures, %zu mismatches, %.2fs (limit 10s)", failures, dt)};
}

// ---- 2: partition law -------------------------------------------------------
Outcome partition_law() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> n_dist(0, 50);
  std::size_t failures = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int K = std::array{4, 8, 16}[rep % 3];
    auto qs = random_patterns(rng, n_dist(rng), K);
    auto corpus = corpus_for(qs);
    auto sampled = sample_for(corpus, qs);
    auto f = filter_dataset(sampled, default_rules());
    auto d = discard_dataset(sampled, default_rules());
    std::vector<std::pair<EntryKey, std::string>> lhs, rhs;
    for (const auto* ds : {&f, &d})
      for (const auto& t : ds->entries()) lhs.emplace_back(key_of(t), t.extracted_answer);
    for (const auto& t : sampled.entries()) rhs.emplace_back(key_of(t), t.extracted_answer);
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    if (lhs != rhs || f.size() + d.size() != sampled.size()) ++failures;
  }
  return {failures == 0, fmt("500 fixtures, %zu violations", failures)};
}

// ---- 3/4/7: calibration suite on the default config ------------------------
struct SeedRuns {
  RunReport vanilla, rp, sc;
};

double level_share(const MetricsRow& row, int level) { return (*row.level_share)[level - 1]; }

Outcome matthew_effect(const std::vector<SeedRuns>& runs, double dt) {
  int head_up = 0, tail_down = 0, shorter = 0;
  std::string trace;
  for (const auto& r : runs) {
    auto f = r.vanilla.rows_for("filter");
    auto t = r.vanilla.rows_for("train");
    bool up = true, down = true;
    for (std::size_t i = 1; i < f.size(); ++i) {
      up = up && level_share(f[i], 1) >= level_share(f[i - 1], 1);
      down = down && level_share(f[i], 5) <= level_share(f[i - 1], 5);
    }
    head_up += up;
    tail_down += down;
    shorter += *t.back().mean_length < *t.front().mean_length;
  }
  const bool pass = head_up >= 8 && tail_down >= 8 && shorter >= 8 && dt < 60.0;
  return {pass, fmt("head non-decreasing %d/10, tail non-increasing %d/10, train length 1->5 decreasing %d/10, "
                    "vanilla runs %.2fs (limit 60s)",
                    head_up, tail_down, shorter, dt)};
}

Outcome rp_mitigation(const std::vector<SeedRuns>& runs) {
  int ok = 0;
  double head_v = 0, head_rp = 0, tail_v = 0, tail_rp = 0;
  for (const auto& r : runs) {
    const auto v = r.vanilla.rows_for("train").back();
    const auto p = r.rp.rows_for("train").back();
    ok += level_share(p, 1) < level_share(v, 1) && level_share(p, 5) > level_share(v, 5);
    head_v += level_share(v, 1);
    head_rp += level_share(p, 1);
    tail_v += level_share(v, 5);
    tail_rp += level_share(p, 5);
  }
  return {ok >= 9, fmt("%d/10 seeds; mean final train head %.3f -> %.3f, tail %.3f -> %.3f "
                       "(reference 0.511 -> 0.248, 0.015 -> 0.066)",
                       ok, head_v / 10, head_rp / 10, tail_v / 10, tail_rp / 10)};
}

Outcome self_correction(const std::vector<SeedRuns>& runs) {
  int ok = 0;
  std::size_t corrected = 0, bad = 0;
  const auto rules = default_rules();
  for (const auto& r : runs) {
    const auto v = r.vanilla.rows_for("train").back();
    const auto s = r.sc.rows_for("train").back();
    ok += level_share(s, 5) >= level_share(v, 5);
    const auto& ds = *r.sc.train_final;
    for (const auto& t : ds.entries()) {
      if (t.origin != Origin::corrected) continue;
      ++corrected;
      if (reward(ds.query_of(t), t.extracted_answer, rules) != 1 ||
          t.length_tokens - t.prefix_tokens < r.sc.config.strategy.min_cot_tokens)
        ++bad;
    }
  }
  return {ok >= 8 && bad == 0 && corrected > 0,
          fmt("level-5 share >= vanilla in %d/10 seeds; %zu corrected entries, %zu failing reward/CoT floor", ok,
              corrected, bad)};
}

// ---- 5: guided dominance ----------------------------------------------------
Outcome guided_dominance() {
  // Symbolic: p_cond - p = (1 - p)(1 - (1 - f)^gamma) with 1 - p = (10 - i)/10 >= 0
  // and 1 - f = a/b, 0 < a <= b. (a/b)^gamma <= 1 reduces to integer
  // comparisons: a <= b for gamma = 1, a^2 <= b^2 for gamma = 2, and a <= b
  // for gamma = 1/2 (square both sides).
  std::size_t cases = 0, failures = 0;
  for (int S : {2, 4, 8})
    for (int i = 0; i <= 10; ++i)
      for (int s = 1; s <= S; ++s)
        for (int g2 : {1, 2, 4}) {  // gamma = g2 / 2
          ++cases;
          const long a = S - (s - 1), b = S;
          const bool one_minus_p_nonneg = 10 - i >= 0;
          bool power_le_one = false;
          if (g2 == 2) power_le_one = a <= b;
          else if (g2 == 4) power_le_one = a * a <= b * b;
          else power_le_one = a <= b;
          if (!(one_minus_p_nonneg && power_le_one && a > 0)) ++failures;
          // And the implementation never reports less than p.
          const double p = i / 10.0;
          if (guided_success_probability(p, s, S, g2 / 2.0) < p) ++failures;
        }
  return {failures == 0, fmt("%zu grid points (p in 0..1 by 0.1, s in 1..S, S in {2,4,8}, gamma in {0.5,1,2}), %zu failures",
                             cases, failures)};
}

// ---- 6: iterative union vs batch -------------------------------------------
Outcome iterative_vs_batch() {
  const auto t0 = Clock::now();
  RunConfig u;
  u.N = 1000;
  u.K = 8;
  u.T = 5;
  u.mode = RunMode::iterative_union;
  RunConfig b = u;
  b.mode = RunMode::batch_baseline;
  std::vector<std::future<std::pair<std::size_t, std::size_t>>> jobs;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      return std::make_pair(run_iterative_union(u, seed).solved_queries, run_batch_baseline(b, seed).solved_queries);
    }));
  int ge = 0, gt = 0;
  std::string pairs;
  for (auto& j : jobs) {
    auto [iu, bb] = j.get();
    ge += iu >= bb;
    gt += iu > bb;
    pairs += fmt(" %zu/%zu", iu, bb);
  }
  const double dt = seconds_since(t0);
  return {ge >= 8 && gt >= 5 && dt < 60.0,
          fmt(">= in %d/10, > in %d/10 (union/batch:%s), %.2fs (limit 60s)", ge, gt, pairs.c_str(), dt)};
}

// ---- 8: determinism ---------------------------------------------------------
Outcome determinism() {
  const auto root = fs::temp_directory_path() / "headtail_acceptance_determinism";
  fs::remove_all(root);
  std::size_t compared = 0, differing = 0;
  int combo = 0;
  for (auto mode : {RunMode::self_improve, RunMode::batch_baseline, RunMode::iterative_union})
    for (auto kind : {StrategyKind::vanilla, StrategyKind::tc, StrategyKind::rp, StrategyKind::ar, StrategyKind::gr,
                      StrategyKind::sc}) {
      RunConfig c;
      c.N = 150;
      c.K = 4;
      c.T = 3;
      c.mode = mode;
      c.strategy.kind = kind;
      ++combo;
      const auto a = root / std::to_string(combo) / "a", b = root / std::to_string(combo) / "b";
      emit_report(run_mode(c, 11), a);
      emit_report(run_mode(c, 11), b);
      for (const char* f : {"metrics.csv", "datasets/train_final.jsonl", "config.json", "learner_final.json",
                            "summary.json"}) {
        ++compared;
        differing += read_file(a / f) != read_file(b / f);
      }
    }
  // Offline mode too.
  const auto in = root / "offline_in.jsonl";
  std::string log;
  for (int q = 1; q <= 50; ++q)
    for (int j = 0; j < 8; ++j)
      log += Json{{"query_id", q}, {"gt_answer", "x"}, {"extracted_answer", j < q % 9 ? "x" : "y"}, {"token_count", 20 + j}}
                 .dump() +
             "\n";
  write_file(in, log);
  OfflineOptions o;
  o.strategy.kind = StrategyKind::tc;
  rebalance_offline(in, o, root / "off_a.jsonl");
  rebalance_offline(in, o, root / "off_b.jsonl");
  ++compared;
  differing += read_file(root / "off_a.jsonl") != read_file(root / "off_b.jsonl");
  fs::remove_all(root);
  return {differing == 0, fmt("%zu file pairs across %d run configs plus offline, %zu differ", compared, combo, differing)};
}

// ---- 9: difficulty calibration ---------------------------------------------
Outcome calibration() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> n_dist(1, 300), hits(0, 64);
  std::size_t failures = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::map<QueryId, double> rates;
    const int n = n_dist(rng);
    QueryId id = 0;
    for (int i = 0; i < n; ++i) rates[id += 1 + static_cast<QueryId>(rng() % 3)] = hits(rng) / 64.0;
    auto levels = calibrate_difficulty(rates);
    std::array<int, kNumLevels> size{};
    std::array<double, kNumLevels> lo, hi;
    lo.fill(2.0);
    hi.fill(-1.0);
    for (const auto& [q, l] : levels) {
      ++size[l - 1];
      lo[l - 1] = std::min(lo[l - 1], rates.at(q));
      hi[l - 1] = std::max(hi[l - 1], rates.at(q));
    }
    if (levels.size() != rates.size()) ++failures;
    const auto [mn, mx] = std::minmax_element(size.begin(), size.end());
    if (*mx - *mn > 1) ++failures;
    // Easier levels never hold a lower pass rate than harder ones.
    for (int l = 0; l + 1 < kNumLevels; ++l)
      if (size[l] && size[l + 1] && hi[l + 1] > lo[l]) ++failures;
    // Ties split across a boundary go to the smaller id first.
    for (const auto& [qa, la] : levels)
      for (const auto& [qb, lb] : levels)
        if (qa < qb && rates.at(qa) == rates.at(qb) && la > lb) ++failures;
  }
  return {failures == 0, fmt("1000 corpora, %zu violations", failures)};
}

// ---- 10: offline round trip -------------------------------------------------
Outcome offline_round_trip() {
  const auto root = fs::temp_directory_path() / "headtail_acceptance_offline";
  fs::remove_all(root);
  std::mt19937_64 rng(10);
  const int K = 8, L = 4, queries = 1250;
  std::map<QueryId, int> k;
  std::string log;
  std::uniform_int_distribution<int> kd(0, K), len(1, 600);
  for (int q = 1; q <= queries; ++q) {
    k[q] = kd(rng);
    for (int j = 0; j < K; ++j)
      log += Json{{"query_id", q},
                  {"gt_answer", "\\frac{" + std::to_string(q) + "}{2}"},
                  {"extracted_answer", j < k[q] ? "$\\dfrac{" + std::to_string(q) + "}{2}$" : "0"},
                  {"token_count", len(rng)},
                  {"iteration", 1}}
                 .dump() +
             "\n";
  }
  const auto in = root / "log.jsonl";
  write_file(in, log);
  std::size_t expect_tc = 0, expect_rp = 0;
  for (const auto& [q, kk] : k) {
    expect_tc += static_cast<std::size_t>(std::min(kk, L));
    expect_rp += kk > 0 ? K : 0;
  }
  std::string detail;
  bool pass = true;
  for (auto kind : {StrategyKind::tc, StrategyKind::rp}) {
    OfflineOptions o;
    o.strategy.kind = kind;
    o.strategy.K = K;
    o.strategy.L = L;
    const auto out = root / (std::string(to_string(kind)) + ".jsonl");
    const auto t0 = Clock::now();
    auto summary = rebalance_offline(in, o, out);
    const double dt = seconds_since(t0);
    // Every output line must itself validate as a log record.
    std::size_t lines = 0, invalid = 0;
    std::istringstream body(read_file(out));
    std::string text;
    while (std::getline(body, text)) {
      ++lines;
      try {
        parse_log_record(text, lines);
        if (!Json::parse(text).contains("sample_index")) ++invalid;
      } catch (const SchemaError&) {
        ++invalid;
      }
    }
    const std::size_t expect = kind == StrategyKind::tc ? expect_tc : expect_rp;
    const bool ok = summary.records_in == 10000 && lines == expect && summary.records_out == expect && invalid == 0 &&
                    dt < 5.0;
    pass = pass && ok;
    detail += fmt("%s: %zu records (law %zu), %zu invalid, %.2fs; ", std::string(to_string(kind)).c_str(), lines,
                  expect, invalid, dt);
  }
  fs::remove_all(root);
  return {pass, detail + "limit 5s"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  criteria.emplace_back("strategy-oracle equivalence", strategy_oracles);
  criteria.emplace_back("partition law", partition_law);

  // Criteria 3, 4 and 7 share the ten default-config runs.
  std::vector<SeedRuns> runs;
  double vanilla_seconds = 0.0;
  auto calibration_runs = [&]() -> const std::vector<SeedRuns>& {
    if (runs.empty()) {
      const auto t0 = Clock::now();
      RunConfig c;
      std::vector<std::future<RunReport>> v;
      for (std::uint64_t s = 0; s < 10; ++s)
        v.push_back(std::async(std::launch::async, [c, s] { return run_self_improvement(c, s); }));
      std::vector<RunReport> vanilla;
      for (auto& f : v) vanilla.push_back(f.get());
      vanilla_seconds = seconds_since(t0);
      std::vector<std::future<std::pair<RunReport, RunReport>>> rest;
      for (std::uint64_t s = 0; s < 10; ++s)
        rest.push_back(std::async(std::launch::async, [c, s]() mutable {
          c.strategy.kind = StrategyKind::rp;
          auto rp = run_self_improvement(c, s);
          c.strategy.kind = StrategyKind::sc;
          return std::make_pair(std::move(rp), run_self_improvement(c, s));
        }));
      for (std::size_t s = 0; s < 10; ++s) {
        auto [rp, sc] = rest[s].get();
        runs.push_back({std::move(vanilla[s]), std::move(rp), std::move(sc)});
      }
    }
    return runs;
  };
  criteria.emplace_back("Matthew-effect reproduction",
                        [&] {
                          const auto& r = calibration_runs();
                          return matthew_effect(r, vanilla_seconds);
                        });
  criteria.emplace_back("RP mitigation", [&] { return rp_mitigation(calibration_runs()); });
  criteria.emplace_back("guided-resampling dominance", guided_dominance);
  criteria.emplace_back("iterative union vs batch", iterative_vs_batch);
  criteria.emplace_back("self-correction augmentation", [&] { return self_correction(calibration_runs()); });
  criteria.emplace_back("determinism", determinism);
  criteria.emplace_back("difficulty calibration", calibration);
  criteria.emplace_back("offline round trip", offline_round_trip);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
