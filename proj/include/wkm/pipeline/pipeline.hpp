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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/core/knowledge.hpp"
#include "wkm/core/trajectory.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/kb/knowledge_base.hpp"
#include "wkm/provider/operations.hpp"
#include "wkm/provider/provider.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm {

// Problems that skip one item of a stage without failing the stage.
struct StageReport {
  std::string task_id;
  std::size_t step_index = 0;  // 0 when the report concerns a whole task
  std::string reason;
  bool transport = false;  // the provider could not be reached
};

Json to_json(const StageReport& r);

struct ExploreResult {
  std::vector<Trajectory> trajectories;  // in task order, failed tasks omitted
  std::vector<StageReport> failures;
};

// Runs the agent on each task in ReAct fashion at exploration temperature
// until the episode ends. A provider error aborts that task only.
ExploreResult collect_explored(const std::vector<const env::TaskSpec*>& tasks, Provider& agent,
                               const PromptTemplate& plan, const std::string& example = {},
                               std::size_t jobs = 1);

struct SynthesizedKnowledge {
  TaskKnowledge knowledge;
  std::size_t pair_index = 0;  // position of the pair among the task's pairs
};

struct SynthesisResult {
  std::map<std::string, SynthesizedKnowledge> knowledge;  // by task id
  std::vector<StageReport> failures;
};

// One knowledge record per task. Pairs are tried in input order and the
// first that yields a well-formed answer wins; a task whose pairs all fail
// is reported.
SynthesisResult synthesize_all_task_knowledge(const std::vector<PreferencePair>& pairs,
                                              Provider& agent, const PromptTemplate& task_know,
                                              const std::string& example = {},
                                              bool chosen_only = false, std::size_t jobs = 1);

struct SummaryResult {
  std::vector<StateKnowledge> states;  // ascending step_index
  std::vector<StageReport> skipped;
};

// s_t for every step t of the expert, each from the history through o_t.
// Steps whose answer is malformed are skipped and reported.
SummaryResult summarize_states(const Trajectory& expert, Provider& provider,
                               const PromptTemplate& state_know,
                               const std::optional<TaskKnowledge>& task_knowledge = std::nullopt,
                               const std::string& example = {},
                               const WarningSink& warn = log_warning);

// Copies the expert with each summarized step's state_knowledge filled in.
Trajectory annotate(const Trajectory& expert, const std::vector<StateKnowledge>& states);

struct KbBuildResult {
  std::vector<KBRecord> records;
  std::vector<StageReport> dropped;
};

// (a_t, s_t, a_{t+1}) for each state whose step has a successor.
KbBuildResult build_kb_records(const Trajectory& expert, const std::vector<StateKnowledge>& states,
                               Provider& embedder);

enum class TrainingTarget { kAgent, kWkm };

struct TrainingRecord {
  TrainingTarget target = TrainingTarget::kAgent;
  std::string full_text;
  std::vector<std::pair<std::size_t, std::size_t>> mask_spans;  // [begin, end) bytes

  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

std::string_view to_string(TrainingTarget t);
Json to_json(const TrainingRecord& r);
TrainingRecord training_record_from_json(const Json& j);

struct TrainingCorpora {
  std::vector<TrainingRecord> agent;
  std::vector<TrainingRecord> wkm;
};

// Agent records: instruction, task knowledge and the plain trajectory, with
// loss on the Thought and Action blocks. WKM records: the same plus each
// step's state knowledge after its observation, with loss on the task
// knowledge and state knowledge blocks. Throws PreconditionError when an
// expert has no task knowledge.
TrainingCorpora emit_training(const std::vector<Trajectory>& annotated_experts,
                              const std::map<std::string, TaskKnowledge>& knowledge);

TrainingRecord agent_training_record(const Trajectory& expert, const TaskKnowledge& knowledge);
TrainingRecord wkm_training_record(const Trajectory& annotated, const TaskKnowledge& knowledge);

// Negative sum of per-byte scores inside the mask spans. Throws
// PreconditionError when the score count differs from the text length.
double masked_score(const TrainingRecord& record, const std::vector<double>& per_char_scores);

}  // namespace wkm
