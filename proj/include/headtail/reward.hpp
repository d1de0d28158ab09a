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
#include <utility>
#include <vector>

#include "headtail/dataset.hpp"

namespace headtail {

struct AnswerNormalizationRules {
  bool lowercase = true;
  bool trim_whitespace = true;
  bool strip_math_wrappers = true;  // $...$, $$...$$, \(...\), \[...\], \boxed{...}
  std::vector<std::pair<std::string, std::string>> symbol_aliases;  // literal pattern -> canonical
};

// Trim, lowercase, wrapper stripping and the built-in alias table
// (\pi -> π, \times -> ×, ...). Fraction spacing ("1 / 2" -> "1/2") is part of
// whitespace normalization.
AnswerNormalizationRules default_rules();

// Same switches as default_rules() but no aliases: pure exact match after
// trimming and case folding.
AnswerNormalizationRules exact_match_rules();

// Reads a two-column UTF-8 alias table (pattern<TAB>canonical). Blank lines and
// lines starting with '#' are skipped. Throws SchemaError citing the line.
std::vector<std::pair<std::string, std::string>> load_alias_table(const std::filesystem::path& path);

// Canonical, idempotent form of an answer string.
std::string normalize_answer(std::string_view raw, const AnswerNormalizationRules& rules);

// The binary reward: 1 iff the normalized extracted answer equals the
// normalized ground truth.
int reward(const QueryRecord& query, std::string_view extracted, const AnswerNormalizationRules& rules);

// Entries with reward 1, marked correct, tagged `filter`.
TrajectoryDataset filter_dataset(const TrajectoryDataset& sampled, const AnswerNormalizationRules& rules);

// Entries with reward 0, marked incorrect, tagged `discard`.
TrajectoryDataset discard_dataset(const TrajectoryDataset& sampled, const AnswerNormalizationRules& rules);

// Keeps entries whose own reasoning (length minus any guided prefix) spans at
// least `min_tokens` tokens. The role tag is preserved.
TrajectoryDataset cot_length_filter(const TrajectoryDataset& dataset, int min_tokens);

inline constexpr int kDefaultMinCotTokens = 10;

}  // namespace headtail
