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

#include "headtail/config.hpp"

#include "headtail/error.hpp"

namespace headtail {
namespace {

template <class T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": wrong type");
  }
}

int get_int(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
  return get_as<int>(v, key);
}

void parse_strategy(StrategyConfig& s, const Json& j) {
  if (j.is_string()) {
    s.kind = strategy_from_string(j.get<std::string>());
    return;
  }
  if (!j.is_object()) throw ConfigError("strategy: expected a name or an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      if (!value.is_string()) throw ConfigError("strategy.kind: expected a string");
      s.kind = strategy_from_string(value.get<std::string>());
    } else if (key == "L") {
      s.L = get_int(value, "strategy.L");
    } else if (key == "S") {
      s.S = get_int(value, "strategy.S");
    } else if (key == "min_cot_tokens") {
      s.min_cot_tokens = get_int(value, "strategy.min_cot_tokens");
    } else {
      throw ConfigError("strategy: unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::self_improve: return "self_improve";
    case RunMode::batch_baseline: return "batch_baseline";
    case RunMode::iterative_union: return "iterative_union";
  }
  return "?";
}

RunMode run_mode_from_string(std::string_view name) {
  if (name == "self_improve") return RunMode::self_improve;
  if (name == "batch_baseline") return RunMode::batch_baseline;
  if (name == "iterative_union") return RunMode::iterative_union;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(ApplyPoint point) {
  return point == ApplyPoint::per_iteration ? "per_iteration" : "on_union";
}

ApplyPoint apply_point_from_string(std::string_view name) {
  if (name == "per_iteration") return ApplyPoint::per_iteration;
  if (name == "on_union") return ApplyPoint::on_union;
  throw ConfigError("unknown apply_point '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (N < 1) throw ConfigError("N must be >= 1");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (T < 1) throw ConfigError("T must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (calibration_shots < 1) throw ConfigError("calibration_shots must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  auto s = strategy;
  s.K = mode == RunMode::batch_baseline ? K * T : K;
  s.validate();
  learner.validate();
}

RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "N") c.N = get_int(value, key);
    else if (key == "K") c.K = get_int(value, key);
    else if (key == "T") c.T = get_int(value, key);
    else if (key == "strategy") parse_strategy(c.strategy, value);
    else if (key == "mode") c.mode = run_mode_from_string(get_as<std::string>(value, key));
    else if (key == "restart_each_iteration") {
      if (!value.is_boolean()) throw ConfigError(key + ": expected a boolean");
      c.restart_each_iteration = value.get<bool>();
    } else if (key == "seeds") {
      if (!value.is_array()) throw ConfigError("seeds: expected an array");
      c.seeds.clear();
      for (const auto& s : value) {
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
          throw ConfigError("seeds: expected non-negative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    } else if (key == "learner") update_from_json(c.learner, value);
    else if (key == "calibration_shots") c.calibration_shots = get_int(value, key);
    else if (key == "output_dir") c.output_dir = get_as<std::string>(value, key);
    else if (key == "apply_point") c.apply_point = apply_point_from_string(get_as<std::string>(value, key));
    else if (key == "answer_rules") {
      const auto name = get_as<std::string>(value, key);
      if (name == "standard") c.answer_rules = AnswerRules::standard;
      else if (name == "exact") c.answer_rules = AnswerRules::exact;
      else throw ConfigError("answer_rules: expected 'standard' or 'exact'");
    } else throw ConfigError("config: unknown key '" + key + "'");
  }
  c.strategy.K = c.K;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(j);
}

Json to_json(const RunConfig& c) {
  return Json{{"N", c.N},
              {"K", c.K},
              {"T", c.T},
              {"strategy",
               {{"kind", std::string(to_string(c.strategy.kind))},
                {"L", c.strategy.L},
                {"S", c.strategy.S},
                {"min_cot_tokens", c.strategy.min_cot_tokens}}},
              {"mode", std::string(to_string(c.mode))},
              {"restart_each_iteration", c.restart_each_iteration},
              {"seeds", c.seeds},
              {"learner", to_json(c.learner)},
              {"calibration_shots", c.calibration_shots},
              {"output_dir", c.output_dir},
              {"apply_point", std::string(to_string(c.apply_point))},
              {"answer_rules", c.answer_rules == AnswerRules::exact ? "exact" : "standard"}};
}

AnswerNormalizationRules rules_for(const RunConfig& c) {
  return c.answer_rules == AnswerRules::exact ? exact_match_rules() : default_rules();
}

}  // namespace headtail
