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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/core/action.hpp"

namespace wkm {

enum class Split { kTrain, kTestSeen, kTestUnseen };
enum class EnvKind { kHousehold, kShopping, kScience };
enum class TrajectorySource { kExpert, kExplored, kPlanned };

std::string_view to_string(Split s);
std::string_view to_string(EnvKind k);
std::string_view to_string(TrajectorySource s);
Split parse_split(std::string_view s);
EnvKind parse_env_kind(std::string_view s);
TrajectorySource parse_source(std::string_view s);

struct TaskInstruction {
  std::string id;
  std::string text;
  Split split = Split::kTrain;
  EnvKind env_kind = EnvKind::kHousehold;

  friend bool operator==(const TaskInstruction&, const TaskInstruction&) = default;
};

struct Step {
  ActionRecord action;
  std::string observation;
  // Present only once the trajectory has been annotated with summaries.
  std::optional<std::string> state_knowledge;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
  TaskInstruction task;
  std::vector<Step> steps;
  double reward = 0.0;
  TrajectorySource source = TrajectorySource::kPlanned;

  // Throws PreconditionError on a broken invariant: empty task text, reward
  // outside [0, 1], no steps, an expert with reward below 1, or an empty
  // observation before the final step.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Corpus line format. Field names are part of the on-disk contract.
Json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const Json& j);

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts);

class PreferencePair {
 public:
  // Enforces same task, chosen expert with reward 1, rejected explored with
  // reward <= chosen.
  PreferencePair(Trajectory chosen, Trajectory rejected);

  const Trajectory& chosen() const noexcept { return chosen_; }
  const Trajectory& rejected() const noexcept { return rejected_; }

 private:
  Trajectory chosen_;
  Trajectory rejected_;
};

struct SkipReport {
  std::string task_id;
  std::string reason;
};

struct PairingResult {
  std::vector<PreferencePair> pairs;
  std::vector<SkipReport> skipped;
};

// One pair per explored trajectory that has a same-task expert. Explored
// runs that tie the expert at reward 1 are still paired as rejected. Pairs
// come out in the order of `explored`.
PairingResult pair_preferences(const std::vector<Trajectory>& experts,
                               const std::vector<Trajectory>& explored);

}  // namespace wkm
