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

#include "headtail/serialize.hpp"

#include <fstream>
#include <sstream>

#include "headtail/error.hpp"

namespace headtail {

Json to_json(const LearnerParams& p) {
  return Json{{"learn_rate", p.learn_rate},
              {"forget_rate", p.forget_rate},
              {"length_imitation", p.length_imitation},
              {"prefix_gain", p.prefix_gain},
              {"correction_base", p.correction_base},
              {"correction_slope", p.correction_slope},
              {"sigma_log_len", p.sigma_log_len},
              {"session_concentration", p.session_concentration}};
}

void update_from_json(LearnerParams& p, const Json& j) {
  if (!j.is_object()) throw ConfigError("learner: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("learner." + key + ": expected a number");
    const double v = value.get<double>();
    if (key == "learn_rate") p.learn_rate = v;
    else if (key == "forget_rate") p.forget_rate = v;
    else if (key == "length_imitation") p.length_imitation = v;
    else if (key == "prefix_gain") p.prefix_gain = v;
    else if (key == "correction_base") p.correction_base = v;
    else if (key == "correction_slope") p.correction_slope = v;
    else if (key == "sigma_log_len") p.sigma_log_len = v;
    else if (key == "session_concentration") p.session_concentration = v;
    else throw ConfigError("learner: unknown key '" + key + "'");
  }
}

Json to_json(const LearnerState& s) {
  Json p = Json::array(), counters = Json::array();
  for (const auto& [id, v] : s.p) p.push_back({id, v});
  for (const auto& [id, c] : s.draw_counter) counters.push_back({id, c});
  return Json{{"iteration", s.iteration},
              {"root_seed", s.root_seed},
              {"params", to_json(s.params)},
              {"mu_log_len", s.mu_log_len},
              {"p", std::move(p)},
              {"draw_counter", std::move(counters)}};
}

LearnerState learner_from_json(const Json& j) {
  try {
    LearnerState s;
    s.iteration = j.at("iteration").get<int>();
    s.root_seed = j.at("root_seed").get<std::uint64_t>();
    update_from_json(s.params, j.at("params"));
    s.params.validate();
    s.mu_log_len = j.at("mu_log_len").get<std::array<double, kNumLevels>>();
    for (const auto& e : j.at("p")) {
      const double v = e.at(1).get<double>();
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("learner state: p outside [0, 1]");
      s.p[e.at(0).get<QueryId>()] = v;
    }
    for (const auto& e : j.at("draw_counter")) s.draw_counter[e.at(0).get<QueryId>()] = e.at(1).get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("learner state: ") + e.what());
  }
}

Json to_json(const QueryRecord& q) {
  Json j{{"id", q.id},
         {"gt_answer", q.gt_answer},
         {"latent_difficulty", q.latent_difficulty},
         {"base_log_length", q.base_log_length}};
  j["level"] = q.level ? Json(*q.level) : Json(nullptr);
  return j;
}

Json snapshot_record(const Trajectory& t, const QueryRecord& q) {
  Json j{{"query_id", t.query_id},
         {"sample_index", t.sample_index},
         {"iteration", t.iteration},
         {"origin", std::string(to_string(t.origin))},
         {"prefix_steps", t.prefix_steps},
         {"length_tokens", t.length_tokens},
         {"correct", t.correct}};
  j["level"] = q.level ? Json(*q.level) : Json(nullptr);
  return j;
}

std::string dataset_snapshot(const TrajectoryDataset& ds) {
  std::string out;
  for (const auto& t : ds.entries()) out += snapshot_record(t, ds.query_of(t)).dump() + "\n";
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace headtail
