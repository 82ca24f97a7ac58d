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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "wkm/core/trajectory.hpp"
#include "wkm/env/world.hpp"

namespace wkm::env {

// One generated task: its initial world plus the omniscient plan that
// solves it.
struct TaskSpec {
  TaskInstruction instruction;
  std::string goal_template;
  std::string initial_observation;
  WorldState initial_state;
  std::vector<std::string> oracle_plan;
  std::vector<std::string> oracle_rationales;  // aligned with oracle_plan
};

struct SuiteSizes {
  std::size_t n_train = 0;
  std::size_t n_seen = 0;
  std::size_t n_unseen = 0;
};

struct TaskSuite {
  EnvConfig config;
  SuiteSizes sizes;
  std::vector<TaskSpec> tasks;  // train, then test-seen, then test-unseen

  std::vector<const TaskSpec*> split(Split s) const;
  const TaskSpec* find(std::string_view task_id) const;
};

// Largest split counts the kind's template pools support. Test-seen tasks
// reuse training combinations, so n_seen is further bounded by n_train.
SuiteSizes template_capacity(const EnvConfig& config);

// Deterministic in (config, sizes). Train tasks draw distinct combinations of
// (goal template, object, destination, layout) from the seen-template pool;
// each test-seen task re-instantiates one training combination with fresh
// distractors; test-unseen tasks come from a disjoint template pool on
// layouts never used for training. Throws PreconditionError for zero counts
// and RangeError when counts exceed capacity.
TaskSuite generate_suite(const EnvConfig& config, const SuiteSizes& sizes);

struct ResetResult {
  TaskInstruction instruction;
  std::string observation;
  std::vector<std::string> available_actions;
  WorldState state;
};

// Starts an episode on suite task `task_index`. Throws RangeError for an
// unknown index.
ResetResult reset(const TaskSuite& suite, std::size_t task_index);
ResetResult reset(const TaskSpec& task);

// Suite manifest: {env_kind, seed, tasks: [{id, split, instruction,
// oracle_plan}]} plus the generation parameters needed to rebuild worlds.
Json suite_manifest(const TaskSuite& suite);
void write_suite_manifest(const std::filesystem::path& path, const TaskSuite& suite);
// Regenerates the suite from the manifest parameters and checks that ids,
// instructions and plans match what was recorded.
TaskSuite load_suite_manifest(const std::filesystem::path& path);

// Replays the oracle plan through step() and packages it as an expert
// trajectory (reward 1 is checked, not assumed).
Trajectory expert_trajectory(const TaskSpec& task);

}  // namespace wkm::env
