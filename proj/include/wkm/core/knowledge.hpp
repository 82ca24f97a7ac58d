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
#include <string>

namespace wkm {

// Global prior for one task: likely object locations and an action workflow.
struct TaskKnowledge {
  std::string task_id;
  std::string text;

  friend bool operator==(const TaskKnowledge&, const TaskKnowledge&) = default;
};

// Summary of the situation after step `step_index` of a trajectory.
struct StateKnowledge {
  std::string task_id;
  std::size_t step_index = 0;
  std::string text;

  friend bool operator==(const StateKnowledge&, const StateKnowledge&) = default;
};

}  // namespace wkm
