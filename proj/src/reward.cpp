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

#include "headtail/reward.hpp"

#include <fstream>

#include "headtail/error.hpp"

namespace headtail {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Collapses whitespace runs to one space and drops spaces around '/'.
std::string tidy_spacing(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ' && out.back() != '/') out.push_back(' ');
      continue;
    }
    if (c == '/' && !out.empty() && out.back() == ' ') out.pop_back();
    out.push_back(c);
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

bool strip_once(std::string& s) {
  auto wrapped = [&](std::string_view open, std::string_view close) {
    return s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close);
  };
  static constexpr std::pair<std::string_view, std::string_view> kWrappers[] = {
      {"$$", "$$"}, {"$", "$"}, {"\\(", "\\)"}, {"\\[", "\\]"}, {"\\boxed{", "}"}};
  for (auto [open, close] : kWrappers) {
    if (wrapped(open, close)) {
      s = trim(std::string_view(s).substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
  }
  return false;
}

void replace_all(std::string& s, std::string_view pattern, std::string_view canonical) {
  if (pattern.empty()) return;
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto hit = s.find(pattern, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out.append(canonical);
    pos = hit + pattern.size();
  }
  if (pos == 0) return;
  out.append(s, pos, std::string::npos);
  s = std::move(out);
}

std::string normalize_pass(std::string s, const AnswerNormalizationRules& rules) {
  if (rules.trim_whitespace) s = trim(s);
  if (rules.strip_math_wrappers)
    while (strip_once(s)) {}
  for (const auto& [pattern, canonical] : rules.symbol_aliases) replace_all(s, pattern, canonical);
  if (rules.lowercase)
    for (auto& c : s)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (rules.trim_whitespace) s = tidy_spacing(s);
  return s;
}

TrajectoryDataset split(const TrajectoryDataset& sampled, const AnswerNormalizationRules& rules,
                        bool keep_correct) {
  if (sampled.role() != Role::sample && sampled.role() != Role::resample)
    throw ConfigError("reward filtering expects a sample or resample dataset");
  std::vector<Trajectory> kept;
  for (const auto& t : sampled.entries()) {
    const bool ok = reward(sampled.query_of(t), t.extracted_answer, rules) == 1;
    if (ok != keep_correct) continue;
    kept.push_back(t);
    kept.back().correct = ok;
  }
  const Role role = keep_correct ? (sampled.role() == Role::sample ? Role::filter : Role::refilter)
                                 : Role::discard;
  return TrajectoryDataset(sampled.corpus_ptr(), role, std::move(kept));
}

}  // namespace

AnswerNormalizationRules default_rules() {
  AnswerNormalizationRules rules;
  rules.symbol_aliases = {
      {"\\pi", "π"},     {"\\times", "×"}, {"\\cdot", "·"},    {"\\div", "÷"},
      {"^\\circ", "°"},  {"^{\\circ}", "°"}, {"\\degree", "°"}, {"\\sqrt", "√"},
      {"\\dfrac", "\\frac"}, {"\\tfrac", "\\frac"}, {"\\left", ""}, {"\\right", ""},
  };
  return rules;
}

AnswerNormalizationRules exact_match_rules() {
  AnswerNormalizationRules rules;
  rules.strip_math_wrappers = false;
  return rules;
}

std::vector<std::pair<std::string, std::string>> load_alias_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open alias table " + path.string());
  std::vector<std::pair<std::string, std::string>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos)
      throw SchemaError("alias table rows need exactly two tab-separated columns", lineno);
    table.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

std::string normalize_answer(std::string_view raw, const AnswerNormalizationRules& rules) {
  // Iterate to a fixed point: one pass can expose a new wrapper or alias match
  // (e.g. "$\pi$" needs stripping before aliasing, "\Pi" lowercases into one).
  std::string cur(raw);
  // Built-in aliases all shrink the text, so this terminates; the cap only
  // guards user tables with cyclic aliases.
  for (int i = 0; i < 64; ++i) {
    std::string next = normalize_pass(cur, rules);
    if (next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

int reward(const QueryRecord& query, std::string_view extracted, const AnswerNormalizationRules& rules) {
  if (query.gt_answer.empty())
    throw ConfigError("query " + std::to_string(query.id) + " has no ground-truth answer");
  return normalize_answer(extracted, rules) == normalize_answer(query.gt_answer, rules) ? 1 : 0;
}

TrajectoryDataset filter_dataset(const TrajectoryDataset& sampled, const AnswerNormalizationRules& rules) {
  return split(sampled, rules, true);
}

TrajectoryDataset discard_dataset(const TrajectoryDataset& sampled, const AnswerNormalizationRules& rules) {
  return split(sampled, rules, false);
}

TrajectoryDataset cot_length_filter(const TrajectoryDataset& dataset, int min_tokens) {
  if (min_tokens < 0) throw ConfigError("min_tokens must be >= 0");
  std::vector<Trajectory> kept;
  for (const auto& t : dataset.entries())
    if (t.length_tokens - t.prefix_tokens >= min_tokens) kept.push_back(t);
  return TrajectoryDataset(dataset.corpus_ptr(), dataset.role(), std::move(kept));
}

}  // namespace headtail
