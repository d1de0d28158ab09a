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

// headtail: run, sweep, rebalance and report from the command line.
//
// Exit codes: 0 success, 2 config error, 3 schema error, 4 internal abort.

#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "headtail/error.hpp"
#include "headtail/harness.hpp"
#include "headtail/offline.hpp"

using namespace headtail;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSchema = 3;
constexpr int kExitAbort = 4;
constexpr const char* kOutputEnv = "HEADTAIL_OUTPUT_DIR";

struct RunFlags {
  std::string config_path;
  std::optional<int> N, K, T, L, S, min_cot, shots;
  std::optional<std::string> strategy, mode, output_dir, apply_point;
  std::optional<bool> restart;
  std::vector<std::uint64_t> seeds;
  int jobs = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_grid) {
  cmd->add_option("-c,--config", f.config_path, "JSON run config");
  cmd->add_option("--N", f.N, "corpus size");
  cmd->add_option("--T", f.T, "iterations");
  cmd->add_option("--mode", f.mode, "self_improve | batch_baseline | iterative_union");
  cmd->add_option("--restart", f.restart, "restart each iteration from M_0 (true/false)");
  cmd->add_option("--apply-point", f.apply_point, "per_iteration | on_union");
  cmd->add_option("--min-cot", f.min_cot, "CoT floor for self-correction");
  cmd->add_option("--calibration-shots", f.shots, "pass@M shots for difficulty levels");
  cmd->add_option("--output-dir", f.output_dir, "output directory (env " + std::string(kOutputEnv) + " wins)");
  cmd->add_option("--jobs", f.jobs, "parallel runs (0 = one per run)");
  if (!with_grid) {
    cmd->add_option("--K", f.K, "samples per query");
    cmd->add_option("--L", f.L, "tail threshold");
    cmd->add_option("--S", f.S, "guided steps");
    cmd->add_option("--strategy", f.strategy, "vanilla | tc | hc | rp | ri | ar | gr | sc");
    cmd->add_option("--seeds", f.seeds, "seeds")->delimiter(',');
  }
}

RunConfig resolve(const RunFlags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_run_config(f.config_path);
  if (f.N) c.N = *f.N;
  if (f.K) c.K = *f.K;
  if (f.T) c.T = *f.T;
  if (f.L) c.strategy.L = *f.L;
  if (f.S) c.strategy.S = *f.S;
  if (f.min_cot) c.strategy.min_cot_tokens = *f.min_cot;
  if (f.shots) c.calibration_shots = *f.shots;
  if (f.strategy) c.strategy.kind = strategy_from_string(*f.strategy);
  if (f.mode) c.mode = run_mode_from_string(*f.mode);
  if (f.apply_point) c.apply_point = apply_point_from_string(*f.apply_point);
  if (f.restart) c.restart_each_iteration = *f.restart;
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (f.output_dir) c.output_dir = *f.output_dir;
  if (const char* env = std::getenv(kOutputEnv); env && *env) c.output_dir = env;
  c.strategy.K = c.K;
  c.validate();
  return c;
}

// Runs `jobs` in batches of `width` threads; results keep submission order.
template <class T>
std::vector<T> parallel(std::vector<std::function<T()>> jobs, int width) {
  std::vector<T> out;
  const std::size_t w = width > 0 ? static_cast<std::size_t>(width) : jobs.size();
  for (std::size_t i = 0; i < jobs.size(); i += std::max<std::size_t>(w, 1)) {
    std::vector<std::future<T>> batch;
    for (std::size_t j = i; j < std::min(jobs.size(), i + w); ++j) batch.push_back(std::async(std::launch::async, jobs[j]));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

std::string describe(const RunReport& r) {
  std::ostringstream os;
  os << "seed " << r.seed << ": " << (r.complete ? "complete" : "INCOMPLETE (" + r.error + ")")
     << ", solved " << r.solved_queries;
  if (!r.evals.empty()) os << ", final greedy pass@1 " << r.evals.back().greedy_pass1;
  const auto filters = r.rows_for("filter");
  if (!filters.empty() && filters.back().head_share)
    os << ", final filter head " << *filters.back().head_share << " tail " << *filters.back().tail_share;
  return os.str();
}

int cmd_run(const RunFlags& f) {
  const RunConfig c = resolve(f);
  std::vector<std::function<RunReport()>> jobs;
  for (auto seed : c.seeds) jobs.push_back([c, seed] { return run_mode(c, seed); });
  bool complete = true;
  for (const auto& r : parallel(std::move(jobs), f.jobs)) {
    emit_report(r, fs::path(c.output_dir) / ("seed_" + std::to_string(r.seed)));
    std::cout << describe(r) << "\n";
    complete = complete && r.complete;
  }
  return complete ? 0 : kExitAbort;
}

struct SweepGrid {
  std::vector<int> K, L, S;
  std::vector<std::string> strategies;
  std::vector<std::uint64_t> seeds;
};

int cmd_sweep(const RunFlags& f, SweepGrid g) {
  const RunConfig base = resolve(f);
  if (g.K.empty()) g.K = {base.K};
  if (g.L.empty()) g.L = {base.strategy.L};
  if (g.S.empty()) g.S = {base.strategy.S};
  if (g.strategies.empty()) g.strategies = {std::string(to_string(base.strategy.kind))};
  if (g.seeds.empty()) g.seeds = base.seeds;

  struct Cell {
    RunConfig config;
    std::uint64_t seed;
    std::string name;
  };
  std::vector<Cell> cells;
  for (const auto& st : g.strategies)
    for (int K : g.K)
      for (int L : g.L)
        for (int S : g.S) {
          RunConfig c = base;
          c.K = K;
          c.strategy.K = K;
          c.strategy.L = L;
          c.strategy.S = S;
          c.strategy.kind = strategy_from_string(st);
          try {
            c.validate();
          } catch (const ConfigError& e) {
            std::cerr << "skipping " << st << " K=" << K << " L=" << L << " S=" << S << ": " << e.what() << "\n";
            continue;
          }
          const std::string name = st + "_K" + std::to_string(K) + "_L" + std::to_string(L) + "_S" + std::to_string(S);
          for (auto seed : g.seeds) cells.push_back({c, seed, name});
        }
  std::vector<std::function<RunReport()>> jobs;
  for (const auto& cell : cells) jobs.push_back([cell] { return run_mode(cell.config, cell.seed); });
  auto reports = parallel(std::move(jobs), f.jobs);

  std::string table = "cell,strategy,K,L,S,seed,complete,solved,final_head,final_tail,greedy_pass1\n";
  bool complete = true;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = reports[i];
    const auto& c = cells[i].config;
    emit_report(r, fs::path(base.output_dir) / cells[i].name / ("seed_" + std::to_string(r.seed)));
    const auto filters = r.rows_for("filter");
    std::string head, tail;
    if (!filters.empty() && filters.back().head_share) {
      head = std::to_string(*filters.back().head_share);
      tail = std::to_string(*filters.back().tail_share);
    }
    table += cells[i].name + "," + std::string(to_string(c.strategy.kind)) + "," + std::to_string(c.K) + "," +
             std::to_string(c.strategy.L) + "," + std::to_string(c.strategy.S) + "," + std::to_string(r.seed) + "," +
             (r.complete ? "1" : "0") + "," + std::to_string(r.solved_queries) + "," + head + "," + tail + "," +
             (r.evals.empty() ? "" : std::to_string(r.evals.back().greedy_pass1)) + "\n";
    complete = complete && r.complete;
  }
  write_file(fs::path(base.output_dir) / "sweep.csv", table);
  std::cout << cells.size() << " runs written under " << base.output_dir << "\n";
  return complete ? 0 : kExitAbort;
}

struct RebalanceFlags {
  std::string input, output, strategy = "vanilla", aliases;
  int K = 8, L = 4, min_cot = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

int cmd_rebalance(const RebalanceFlags& f) {
  OfflineOptions o;
  o.strategy.kind = strategy_from_string(f.strategy);
  o.strategy.K = f.K;
  o.strategy.L = f.L;
  o.strategy.seed = f.seed;
  o.min_cot_tokens = f.min_cot;
  o.rules = f.exact ? exact_match_rules() : default_rules();
  if (!f.aliases.empty()) {
    auto extra = load_alias_table(f.aliases);
    o.rules.symbol_aliases.insert(o.rules.symbol_aliases.end(), extra.begin(), extra.end());
  }
  auto s = rebalance_offline(f.input, o, f.output);
  std::cout << "read " << s.records_in << " records over " << s.queries << " queries, " << s.correct
            << " correct, wrote " << s.records_out << " to " << f.output << "\n";
  return 0;
}

// Recomputes the train-set metrics row from a run directory's snapshot.
int cmd_report(const std::string& dir) {
  const auto cfg_json = Json::parse(read_file(fs::path(dir) / "config.json"));
  Json cfg = cfg_json;
  cfg.erase("seed");
  const RunConfig c = parse_run_config(cfg);
  const int K = c.mode == RunMode::batch_baseline ? c.K * c.T : c.K;

  std::map<QueryId, QueryRecord> queries;
  std::vector<Trajectory> entries;
  std::istringstream in(read_file(fs::path(dir) / "datasets" / "train_final.jsonl"));
  std::string text;
  std::size_t line = 0;
  int last_iteration = 0;
  while (std::getline(in, text)) {
    ++line;
    Json j;
    try {
      j = Json::parse(text);
      Trajectory t;
      t.query_id = j.at("query_id").get<QueryId>();
      t.sample_index = j.at("sample_index").get<int>();
      t.iteration = j.at("iteration").get<int>();
      t.origin = origin_from_string(j.at("origin").get<std::string>());
      t.prefix_steps = j.at("prefix_steps").get<int>();
      t.length_tokens = j.at("length_tokens").get<int>();
      t.correct = j.at("correct").get<bool>();
      auto& q = queries[t.query_id];
      q.id = t.query_id;
      q.gt_answer = "?";
      if (!j.at("level").is_null()) q.level = j.at("level").get<int>();
      last_iteration = std::max(last_iteration, t.iteration);
      entries.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(e.what(), line);
    }
  }
  std::vector<QueryRecord> qs;
  for (auto& [id, q] : queries) qs.push_back(std::move(q));
  auto corpus = make_corpus(std::move(qs));
  // Explored entries stand in for k_i; RP copies can exceed K and are clamped.
  std::map<QueryId, int> counts;
  for (const auto& t : entries)
    if (t.origin == Origin::explored) ++counts[t.query_id];
  TrajectoryDataset ds(corpus, Role::train, std::move(entries));
  std::cout << to_csv(std::vector<MetricsRow>{make_metrics_row(last_iteration, ds, counts, K)});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"headtail: head/tail rebalancing for self-improvement data"};
  app.require_subcommand(1);

  RunFlags run_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "run the self-improvement loop for each seed");
  add_run_flags(run, run_flags, false);

  SweepGrid grid;
  auto* sweep = app.add_subcommand("sweep", "grid over K, L, S, strategies and seeds");
  add_run_flags(sweep, sweep_flags, true);
  sweep->add_option("--K", grid.K, "K values")->delimiter(',');
  sweep->add_option("--L", grid.L, "L values")->delimiter(',');
  sweep->add_option("--S", grid.S, "S values")->delimiter(',');
  sweep->add_option("--strategies", grid.strategies, "strategy names")->delimiter(',');
  sweep->add_option("--seeds", grid.seeds, "seeds")->delimiter(',');

  RebalanceFlags rb;
  auto* rebalance = app.add_subcommand("rebalance", "reshape an offline JSONL sampling log");
  rebalance->add_option("-i,--input", rb.input, "input JSONL")->required();
  rebalance->add_option("-o,--output", rb.output, "output JSONL")->required();
  rebalance->add_option("--strategy", rb.strategy, "vanilla | tc | hc | rp | ri");
  rebalance->add_option("--K", rb.K, "samples per query");
  rebalance->add_option("--L", rb.L, "tc threshold");
  rebalance->add_option("--min-cot", rb.min_cot, "drop records with fewer tokens (0 = off)");
  rebalance->add_option("--seed", rb.seed, "tc truncation seed");
  rebalance->add_option("--aliases", rb.aliases, "extra alias table (pattern<TAB>canonical)");
  rebalance->add_flag("--exact", rb.exact, "exact match after trim and case folding");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "recompute metrics from a run directory");
  report->add_option("dir", report_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, grid);
    if (*rebalance) return cmd_rebalance(rb);
    if (*report) return cmd_report(report_dir);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAbort;
  }
  return 0;
}
