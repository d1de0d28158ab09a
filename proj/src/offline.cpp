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

#include "headtail/offline.hpp"

#include <limits>
#include <map>
#include <sstream>

#include "headtail/error.hpp"
#include "headtail/serialize.hpp"

namespace headtail {
namespace {

const Json& require(const Json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'", line);
  return *it;
}

int as_int(const Json& v, const char* key, std::size_t line) {
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + key + "' must be an integer", line);
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw SchemaError(std::string("field '") + key + "' out of range", line);
  return static_cast<int>(x);
}

std::string as_string(const Json& v, const char* key, std::size_t line) {
  if (!v.is_string()) throw SchemaError(std::string("field '") + key + "' must be a string", line);
  return v.get<std::string>();
}

bool reshaping(StrategyKind k) { return !needs_sampler(k); }

}  // namespace

TrajectoryLogRecord parse_log_record(std::string_view text, std::size_t line) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw SchemaError("malformed JSON", line);
  }
  if (!j.is_object()) throw SchemaError("expected a JSON object", line);
  TrajectoryLogRecord r;
  const auto& id = require(j, "query_id", line);
  if (!id.is_number_integer()) throw SchemaError("field 'query_id' must be an integer", line);
  r.query_id = id.get<QueryId>();
  r.gt_answer = as_string(require(j, "gt_answer", line), "gt_answer", line);
  if (r.gt_answer.empty()) throw SchemaError("field 'gt_answer' must not be empty", line);
  r.extracted_answer = as_string(require(j, "extracted_answer", line), "extracted_answer", line);
  r.token_count = as_int(require(j, "token_count", line), "token_count", line);
  if (r.token_count < 0) throw SchemaError("field 'token_count' must be >= 0", line);
  if (auto it = j.find("step_offsets"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field 'step_offsets' must be an array", line);
    for (const auto& v : *it) {
      const int off = as_int(v, "step_offsets", line);
      if (off < 0 || off >= r.token_count ||
          (!r.step_offsets.empty() && off <= r.step_offsets.back()))
        throw SchemaError("field 'step_offsets' must be ascending offsets below token_count", line);
      r.step_offsets.push_back(off);
    }
  }
  if (auto it = j.find("iteration"); it != j.end() && !it->is_null()) {
    r.iteration = as_int(*it, "iteration", line);
    if (*r.iteration < 1) throw SchemaError("field 'iteration' must be >= 1", line);
  }
  if (auto it = j.find("level"); it != j.end() && !it->is_null()) {
    r.level = as_int(*it, "level", line);
    if (*r.level < 1 || *r.level > kNumLevels) throw SchemaError("field 'level' must lie in 1..5", line);
  }
  return r;
}

std::vector<TrajectoryLogRecord> read_log(const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  std::vector<TrajectoryLogRecord> out;
  std::istringstream in(content);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_log_record(text, line));
  }
  return out;
}

TrajectoryDataset log_to_dataset(const std::vector<TrajectoryLogRecord>& records) {
  std::map<QueryId, QueryRecord> queries;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto [it, fresh] = queries.try_emplace(r.query_id);
    auto& q = it->second;
    if (fresh) {
      q.id = r.query_id;
      q.gt_answer = r.gt_answer;
      q.level = r.level;
    } else {
      if (q.gt_answer != r.gt_answer) throw SchemaError("conflicting gt_answer for query " + std::to_string(r.query_id), i + 1);
      if (q.level != r.level) throw SchemaError("conflicting level for query " + std::to_string(r.query_id), i + 1);
    }
  }
  std::vector<QueryRecord> qs;
  for (auto& [id, q] : queries) qs.push_back(std::move(q));
  auto corpus = make_corpus(std::move(qs));

  std::map<std::pair<QueryId, int>, int> next_index;
  std::vector<Trajectory> entries;
  entries.reserve(records.size());
  for (const auto& r : records) {
    Trajectory t;
    t.query_id = r.query_id;
    t.iteration = r.iteration.value_or(1);
    t.sample_index = ++next_index[{t.query_id, t.iteration}];
    t.length_tokens = r.token_count;
    t.step_boundaries = r.step_offsets;
    t.extracted_answer = r.extracted_answer;
    entries.push_back(std::move(t));
  }
  return TrajectoryDataset(corpus, Role::sample, std::move(entries));
}

TrajectoryDataset rebalance_records(const std::vector<TrajectoryLogRecord>& records, const OfflineOptions& options,
                                    OfflineSummary* summary) {
  if (!reshaping(options.strategy.kind))
    throw ConfigError("strategy requires a sampler; offline mode supports reshaping only");
  options.strategy.validate();
  if (options.min_cot_tokens < 0) throw ConfigError("min_cot_tokens must be >= 0");
  auto sampled = log_to_dataset(records);
  auto filtered = filter_dataset(sampled, options.rules);
  if (options.min_cot_tokens > 0) filtered = cot_length_filter(filtered, options.min_cot_tokens);
  const auto counts = correct_counts(filtered);
  auto out = apply_strategy(options.strategy, filtered, nullptr, nullptr, options.rules).train;
  if (summary) {
    summary->records_in = records.size();
    summary->queries = sampled.corpus().size();
    summary->correct = filtered.size();
    summary->records_out = out.size();
    summary->row = make_metrics_row(1, out, counts, options.strategy.K);
  }
  return out;
}

std::string to_jsonl(const TrajectoryDataset& ds) {
  std::string out;
  for (const auto& t : ds.entries()) {
    const auto& q = ds.query_of(t);
    Json j{{"query_id", t.query_id},
           {"gt_answer", q.gt_answer},
           {"extracted_answer", t.extracted_answer},
           {"token_count", t.length_tokens},
           {"iteration", t.iteration},
           {"sample_index", t.sample_index}};
    if (!t.step_boundaries.empty()) j["step_offsets"] = t.step_boundaries;
    if (q.level) j["level"] = *q.level;
    out += j.dump() + "\n";
  }
  return out;
}

OfflineSummary rebalance_offline(const std::filesystem::path& input, const OfflineOptions& options,
                                 const std::filesystem::path& output) {
  if (!reshaping(options.strategy.kind))
    throw ConfigError("strategy requires a sampler; offline mode supports reshaping only");
  OfflineSummary summary;
  const auto out = rebalance_records(read_log(input), options, &summary);
  const std::string body = to_jsonl(out);
  const std::string csv = to_csv(std::vector<MetricsRow>{summary.row});
  auto csv_path = output;
  csv_path += ".metrics.csv";
  write_file(output, body);
  write_file(csv_path, csv);
  return summary;
}

}  // namespace headtail
