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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "headtail/learner.hpp"
#include "headtail/serialize.hpp"
#include "headtail/strategies.hpp"

namespace headtail {

enum class RunMode : std::uint8_t { self_improve, batch_baseline, iterative_union };
std::string_view to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view name);

// Where a reshaping strategy acts in iterative_union mode: on every
// iteration's filter set, or once on the accumulated union.
enum class ApplyPoint : std::uint8_t { per_iteration, on_union };
std::string_view to_string(ApplyPoint point);
ApplyPoint apply_point_from_string(std::string_view name);

enum class AnswerRules : std::uint8_t { standard, exact };

struct RunConfig {
  int N = 2000;
  int K = 8;
  int T = 5;
  StrategyConfig strategy;  // strategy.K mirrors K; strategy.seed is derived per run
  RunMode mode = RunMode::self_improve;
  bool restart_each_iteration = false;
  std::vector<std::uint64_t> seeds{0};
  LearnerParams learner;
  int calibration_shots = 64;
  std::string output_dir = "headtail_out";
  ApplyPoint apply_point = ApplyPoint::on_union;
  AnswerRules answer_rules = AnswerRules::standard;

  void validate() const;  // throws ConfigError
};

// Strict parse: unknown keys and wrongly typed values throw ConfigError.
// Missing keys keep their defaults.
RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
Json to_json(const RunConfig& config);

AnswerNormalizationRules rules_for(const RunConfig& config);

}  // namespace headtail
