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

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "headtail/dataset.hpp"
#include "headtail/learner.hpp"

namespace headtail {

using Json = nlohmann::json;

Json to_json(const LearnerParams& params);
// Fills `params` from the keys present; unknown keys throw ConfigError.
void update_from_json(LearnerParams& params, const Json& j);

Json to_json(const LearnerState& state);
LearnerState learner_from_json(const Json& j);

Json to_json(const QueryRecord& query);

// One line of a dataset snapshot: query_id, sample_index, iteration, origin,
// prefix_steps, length_tokens, level, correct.
Json snapshot_record(const Trajectory& traj, const QueryRecord& query);
std::string dataset_snapshot(const TrajectoryDataset& dataset);  // JSONL, LF endings

// Writes `content` to `path` atomically (temp file + rename). Throws Error
// naming the path on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace headtail
