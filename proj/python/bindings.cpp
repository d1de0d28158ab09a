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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "headtail/error.hpp"
#include "headtail/harness.hpp"
#include "headtail/offline.hpp"

namespace py = pybind11;
using namespace headtail;

namespace {

AnswerNormalizationRules pick_rules(bool exact) { return exact ? exact_match_rules() : default_rules(); }

Json row_json(const MetricsRow& r) {
  Json j{{"iteration", r.iteration}, {"role", r.role}, {"total", r.total}, {"bucket_share", r.bucket_share}};
  j["level_share"] = r.level_share ? Json(*r.level_share) : Json(nullptr);
  j["mean_length"] = r.mean_length ? Json(*r.mean_length) : Json(nullptr);
  j["head_share"] = r.head_share ? Json(*r.head_share) : Json(nullptr);
  j["tail_share"] = r.tail_share ? Json(*r.tail_share) : Json(nullptr);
  j["matthew_gap"] = r.matthew_gap ? Json(*r.matthew_gap) : Json(nullptr);
  Json per = Json::array();
  for (const auto& v : r.level_mean_length) per.push_back(v ? Json(*v) : Json(nullptr));
  j["level_mean_length"] = per;
  return j;
}

std::string run_json(const std::string& config, std::uint64_t seed) {
  const auto r = run_mode(parse_run_config(Json::parse(config)), seed);
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  Json train = Json::array();
  if (r.train_final)
    for (const auto& t : r.train_final->entries()) train.push_back(snapshot_record(t, r.train_final->query_of(t)));
  Json out = report_summary(r);
  out["rows"] = std::move(rows);
  out["train_final"] = std::move(train);
  out["metrics_csv"] = to_csv(r.rows);
  return out.dump();
}

std::string rebalance_json(const std::string& records_jsonl, const std::string& strategy, int K, int L, int min_cot,
                           std::uint64_t seed, bool exact) {
  std::vector<TrajectoryLogRecord> records;
  std::size_t line = 0, start = 0;
  while (start < records_jsonl.size()) {
    auto end = records_jsonl.find('\n', start);
    if (end == std::string::npos) end = records_jsonl.size();
    ++line;
    const auto text = records_jsonl.substr(start, end - start);
    if (text.find_first_not_of(" \t\r") != std::string::npos) records.push_back(parse_log_record(text, line));
    start = end + 1;
  }
  OfflineOptions o;
  o.strategy.kind = strategy_from_string(strategy);
  o.strategy.K = K;
  o.strategy.L = L;
  o.strategy.seed = seed;
  o.min_cot_tokens = min_cot;
  o.rules = pick_rules(exact);
  OfflineSummary s;
  auto out = rebalance_records(records, o, &s);
  return to_jsonl(out);
}

}  // namespace

PYBIND11_MODULE(_headtail, m) {
  m.doc() = "Core bindings; see the headtail package for the Python-facing API.";

  static py::exception<Error> base(m, "HeadtailError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<SchemaError> schema(m, "SchemaError", base.ptr());
  static py::exception<SamplerError> sampler(m, "SamplerError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SchemaError& e) {
      schema(e.what());
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const SamplerError& e) {
      sampler(e.what());
    } catch (const Error& e) {
      base(e.what());
    } catch (const nlohmann::json::exception& e) {
      config(e.what());
    }
  });

  m.def("normalize_answer", [](const std::string& raw, bool exact) { return normalize_answer(raw, pick_rules(exact)); },
        py::arg("raw"), py::arg("exact") = false);
  m.def(
      "reward",
      [](const std::string& gt, const std::string& extracted, bool exact) {
        QueryRecord q;
        q.gt_answer = gt;
        return reward(q, extracted, pick_rules(exact));
      },
      py::arg("gt_answer"), py::arg("extracted"), py::arg("exact") = false);
  m.def("calibrate_difficulty", &calibrate_difficulty, py::arg("pass_rates"));
  m.def("guided_success_probability", &guided_success_probability, py::arg("p"), py::arg("step"),
        py::arg("num_steps"), py::arg("gamma"));
  m.def(
      "split_steps",
      [](int length, int S) {
        Trajectory t;
        t.length_tokens = length;
        return split_steps(t, S);
      },
      py::arg("length_tokens"), py::arg("S"));
  m.def("run_json", &run_json, py::arg("config"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("rebalance_jsonl", &rebalance_json, py::arg("records"), py::arg("strategy"), py::arg("K"), py::arg("L"),
        py::arg("min_cot_tokens"), py::arg("seed"), py::arg("exact"));
  m.def(
      "rebalance_offline",
      [](const std::string& input, const std::string& output, const std::string& strategy, int K, int L, int min_cot,
         std::uint64_t seed) {
        OfflineOptions o;
        o.strategy.kind = strategy_from_string(strategy);
        o.strategy.K = K;
        o.strategy.L = L;
        o.strategy.seed = seed;
        o.min_cot_tokens = min_cot;
        auto s = rebalance_offline(input, o, output);
        return py::dict(py::arg("records_in") = s.records_in, py::arg("queries") = s.queries,
                        py::arg("correct") = s.correct, py::arg("records_out") = s.records_out);
      },
      py::arg("input"), py::arg("output"), py::arg("strategy") = "vanilla", py::arg("K") = 8, py::arg("L") = 4,
      py::arg("min_cot_tokens") = 0, py::arg("seed") = 0);
  m.def("csv_header", &csv_header);
}
