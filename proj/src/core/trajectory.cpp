// Copyright 2026 The WKM Planner Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wkm/core/trajectory.hpp"

#include <unordered_map>

#include "wkm/common/error.hpp"

namespace wkm {

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTestSeen: return "test-seen";
    case Split::kTestUnseen: return "test-unseen";
  }
  return "train";
}

std::string_view to_string(EnvKind k) {
  switch (k) {
    case EnvKind::kHousehold: return "household";
    case EnvKind::kShopping: return "shopping";
    case EnvKind::kScience: return "science";
  }
  return "household";
}

std::string_view to_string(TrajectorySource s) {
  switch (s) {
    case TrajectorySource::kExpert: return "expert";
    case TrajectorySource::kExplored: return "explored";
    case TrajectorySource::kPlanned: return "planned";
  }
  return "planned";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "test-seen" || s == "seen") return Split::kTestSeen;
  if (s == "test-unseen" || s == "unseen") return Split::kTestUnseen;
  throw FormatError("unknown split: " + std::string(s));
}

EnvKind parse_env_kind(std::string_view s) {
  if (s == "household") return EnvKind::kHousehold;
  if (s == "shopping") return EnvKind::kShopping;
  if (s == "science") return EnvKind::kScience;
  throw FormatError("unknown env_kind: " + std::string(s));
}

TrajectorySource parse_source(std::string_view s) {
  if (s == "expert") return TrajectorySource::kExpert;
  if (s == "explored") return TrajectorySource::kExplored;
  if (s == "planned") return TrajectorySource::kPlanned;
  throw FormatError("unknown source: " + std::string(s));
}

void Trajectory::validate() const {
  if (task.text.empty()) throw PreconditionError("trajectory " + task.id + ": empty task text");
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw PreconditionError("trajectory " + task.id + ": reward outside [0,1]");
  }
  if (steps.empty()) throw PreconditionError("trajectory " + task.id + ": no steps");
  if (source == TrajectorySource::kExpert && reward != 1.0) {
    throw PreconditionError("trajectory " + task.id + ": expert reward must be 1");
  }
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    if (steps[i].observation.empty()) {
      throw PreconditionError("trajectory " + task.id + ": empty observation at step " +
                              std::to_string(i));
    }
  }
}

Json to_json(const Trajectory& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json js = {{"rationale", s.action.rationale()},
               {"action", s.action.action_text()},
               {"observation", s.observation}};
    if (s.state_knowledge) js["state_knowledge"] = *s.state_knowledge;
    steps.push_back(std::move(js));
  }
  return Json{{"task_id", t.task.id},
              {"task_text", t.task.text},
              {"split", to_string(t.task.split)},
              {"env_kind", to_string(t.task.env_kind)},
              {"source", to_string(t.source)},
              {"reward", t.reward},
              {"steps", std::move(steps)}};
}

Trajectory trajectory_from_json(const Json& j) {
  try {
    Trajectory t;
    t.task.id = j.at("task_id").get<std::string>();
    t.task.text = j.at("task_text").get<std::string>();
    t.task.split = parse_split(j.at("split").get<std::string>());
    t.task.env_kind = parse_env_kind(j.at("env_kind").get<std::string>());
    t.source = parse_source(j.at("source").get<std::string>());
    t.reward = j.at("reward").get<double>();
    for (const auto& js : j.at("steps")) {
      Step s;
      auto rationale = js.value("rationale", std::string{});
      auto action = js.at("action").get<std::string>();
      s.action = action.find_first_not_of(" \t\r\n") == std::string::npos
                     ? ActionRecord::unparseable(std::move(rationale))
                     : ActionRecord(std::move(rationale), std::move(action));
      s.observation = js.at("observation").get<std::string>();
      if (js.contains("state_knowledge") && !js["state_knowledge"].is_null()) {
        s.state_knowledge = js["state_knowledge"].get<std::string>();
      }
      t.steps.push_back(std::move(s));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed trajectory: ") + e.what(), j.dump());
  }
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  std::vector<Trajectory> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(trajectory_from_json(j)); });
  return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts) {
  std::vector<Json> rows;
  rows.reserve(ts.size());
  for (const auto& t : ts) rows.push_back(to_json(t));
  write_jsonl(path, rows);
}

PreferencePair::PreferencePair(Trajectory chosen, Trajectory rejected)
    : chosen_(std::move(chosen)), rejected_(std::move(rejected)) {
  if (chosen_.task.id != rejected_.task.id) {
    throw PreconditionError("preference pair spans tasks " + chosen_.task.id + " and " +
                            rejected_.task.id);
  }
  if (chosen_.source != TrajectorySource::kExpert || chosen_.reward != 1.0) {
    throw PreconditionError("preference pair: chosen side must be a reward-1 expert");
  }
  if (rejected_.source != TrajectorySource::kExplored) {
    throw PreconditionError("preference pair: rejected side must be explored");
  }
  if (rejected_.reward > chosen_.reward) {
    throw PreconditionError("preference pair: rejected reward exceeds chosen");
  }
}

PairingResult pair_preferences(const std::vector<Trajectory>& experts,
                               const std::vector<Trajectory>& explored) {
  std::unordered_map<std::string, const Trajectory*> by_task;
  for (const auto& e : experts) {
    if (e.reward != 1.0) {
      throw PreconditionError("pair_preferences: expert " + e.task.id + " has reward < 1");
    }
    by_task.emplace(e.task.id, &e);  // first expert per task wins
  }
  PairingResult result;
  for (const auto& x : explored) {
    auto it = by_task.find(x.task.id);
    if (it == by_task.end()) {
      result.skipped.push_back({x.task.id, "no expert trajectory for task"});
      continue;
    }
    result.pairs.emplace_back(*it->second, x);
  }
  return result;
}

}  // namespace wkm
