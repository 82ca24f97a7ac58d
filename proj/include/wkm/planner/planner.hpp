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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/core/render.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/fusion/fusion.hpp"
#include "wkm/kb/knowledge_base.hpp"
#include "wkm/provider/operations.hpp"
#include "wkm/provider/provider.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm {

enum class PlannerMode {
  kFull,           // task knowledge, state knowledge, retrieval and fusion
  kNoState,        // task knowledge only; agent argmax
  kNoTask,         // like full without task knowledge
  kExplicitState,  // state knowledge written into the history; agent argmax
};

std::string_view to_string(PlannerMode m);
PlannerMode parse_planner_mode(std::string_view s);

struct PlannerConfig {
  FusionConfig fusion;
  // Unset means kDefaultRetrievalN. Only meaningful for modes that retrieve.
  std::optional<std::size_t> retrieval_n;
  PlannerMode mode = PlannerMode::kFull;

  // Throws ConfigError for gamma outside [0, 1], a zero retrieval size, or
  // a retrieval size given to a mode that does not retrieve.
  void validate() const;
  bool retrieves() const noexcept;
  bool summarizes() const noexcept;
  bool uses_task_knowledge() const noexcept { return mode != PlannerMode::kNoTask; }
  std::size_t effective_n() const noexcept { return retrieval_n.value_or(kDefaultRetrievalN); }
  // 1 for modes without fusion.
  double effective_gamma() const noexcept;
};

// Everything a planning step consults. Providers and KB are borrowed.
struct PlannerContext {
  Provider* agent = nullptr;
  Provider* wkm = nullptr;             // required unless mode is no_state
  const KnowledgeBase* kb = nullptr;   // required when the mode retrieves
  PlannerConfig config;
  PromptTemplate plan_template = PromptTemplate::builtin(TemplateName::kPlan);
  PromptTemplate state_template = PromptTemplate::builtin(TemplateName::kStateKnow);
  std::string plan_example;
  std::string state_example;

  // Throws PreconditionError when a required component is missing or a
  // provider holds the wrong role.
  void validate() const;
};

struct RetrievalSummary {
  std::size_t matched = 0;
  double top_similarity = 0.0;
};

struct Decision {
  std::optional<std::string> state_knowledge;
  std::optional<RetrievalSummary> retrieval;
  ActionDistribution p_agent;
  std::optional<ActionDistribution> p_know;
  FusionResult fusion;
};

// Phase timings in milliseconds, kept outside the trace so traces stay
// reproducible.
struct PhaseTimings {
  double task_knowledge_ms = 0.0;
  double state_knowledge_ms = 0.0;
  double retrieval_ms = 0.0;
  double agent_ms = 0.0;
  double env_ms = 0.0;
};

// One planning decision. `history` is the rendered h_t; `prev_action` is
// the canonical id of the last executed action (none at the first step,
// which therefore skips state knowledge and retrieval). In explicit_state
// mode the generated state knowledge is appended to `history`.
Decision decide(const PlannerContext& ctx, HistoryWriter& history,
                const std::vector<std::string>& available,
                const std::optional<std::string>& prev_action, const std::string& task_id,
                std::size_t step, PhaseTimings* timings = nullptr);

struct TraceStep {
  std::string history_hash;
  std::optional<std::string> state_knowledge;
  std::optional<RetrievalSummary> retrieval;
  std::vector<double> p_agent;
  std::optional<std::vector<double>> p_know;
  bool kb_silent = true;
  std::vector<double> fused;
  std::string action;
  std::string observation;
  bool was_valid = false;
};

struct EpisodeTrace {
  TaskInstruction task;
  PlannerMode mode = PlannerMode::kFull;
  double gamma = 1.0;
  std::optional<std::size_t> retrieval_n;
  std::optional<std::string> task_knowledge;
  std::vector<std::string> available_actions;
  std::vector<TraceStep> steps;
  double reward = 0.0;
  bool aborted = false;
  std::string abort_reason;
  bool transport_failure = false;
  PhaseTimings timings;

  bool hallucinated() const;
};

// Plans one task to completion. Provider failures end the episode early
// with `aborted` set and the steps so far retained.
EpisodeTrace run_episode(const env::TaskSpec& task, const PlannerContext& ctx);

// Header line, one line per step, footer line.
std::vector<Json> trace_lines(const EpisodeTrace& trace);
void write_traces(const std::filesystem::path& path, const std::vector<EpisodeTrace>& traces);
Json timings_json(const EpisodeTrace& trace);

struct TaskOutcome {
  std::string task_id;
  double reward = 0.0;
  std::size_t steps = 0;
  bool hallucinated = false;
  bool aborted = false;

  friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

struct MetricsReport {
  double avg_reward = 0.0;
  double avg_steps = 0.0;
  double hallucinatory_rate = 0.0;  // fraction in [0, 1]
  std::size_t n_tasks = 0;
  std::vector<TaskOutcome> per_task;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

Json to_json(const MetricsReport& m);

// Aggregates finished traces; aborted episodes count as reward 0.
MetricsReport summarize_traces(const std::vector<EpisodeTrace>& traces);

struct Evaluation {
  MetricsReport metrics;
  std::vector<EpisodeTrace> traces;
};

// Runs every task (in order, on up to `jobs` threads) and aggregates.
// Throws PreconditionError for an empty task list.
Evaluation evaluate(const std::vector<const env::TaskSpec*>& tasks, const PlannerContext& ctx,
                    std::size_t jobs = 1);

struct SweepRow {
  double gamma = 0.0;
  MetricsReport metrics;
};

// One full-mode evaluation per gamma on the same tasks and providers.
std::vector<SweepRow> sweep_gamma(const std::vector<double>& gammas,
                                  const std::vector<const env::TaskSpec*>& tasks,
                                  const PlannerContext& ctx, std::size_t jobs = 1);

// "32.86%"
std::string format_percent(double fraction);

// Share of common tasks on which `a` needed fewer steps than `b`; a tie
// earns half a win. Tasks present in only one report are ignored. Throws
// PreconditionError when no task is shared.
double win_rate(const MetricsReport& a, const MetricsReport& b);

}  // namespace wkm
