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

#include "wkm/pipeline/pipeline.hpp"

#include <algorithm>

#include "wkm/common/error.hpp"
#include "wkm/common/parallel.hpp"
#include "wkm/core/render.hpp"

namespace wkm {

Json to_json(const StageReport& r) {
  return Json{{"task_id", r.task_id}, {"step_index", r.step_index}, {"reason", r.reason}};
}

ExploreResult collect_explored(const std::vector<const env::TaskSpec*>& tasks, Provider& agent,
                               const PromptTemplate& plan, const std::string& example,
                               std::size_t jobs) {
  std::vector<std::optional<Trajectory>> slots(tasks.size());
  std::vector<std::optional<StageReport>> errors(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const env::TaskSpec& task = *tasks[i];
    env::ResetResult start = env::reset(task);
    env::WorldState& world = start.state;
    HistoryWriter history(task.instruction.text);
    Trajectory t;
    t.task = task.instruction;
    t.source = TrajectorySource::kExplored;
    try {
      while (!world.done) {
        const std::string prompt =
            plan.fill({{"example", example}, {"history", history.text()}});
        ActionRecord a = propose_action(agent, prompt, kExploreTemperature);
        const env::StepOutcome out = env::step(world, a);
        history.thought(a.rationale());
        history.action(a.action_text());
        history.observation(out.observation);
        t.steps.push_back(Step{std::move(a), out.observation, std::nullopt});
      }
    } catch (const TransportError& e) {
      errors[i] = StageReport{task.instruction.id, 0, e.what(), true};
      return;
    } catch (const FormatError& e) {
      errors[i] = StageReport{task.instruction.id, 0, e.what()};
      return;
    }
    t.reward = world.reward;
    slots[i] = std::move(t);
  });
  ExploreResult out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (slots[i]) out.trajectories.push_back(std::move(*slots[i]));
    if (errors[i]) out.failures.push_back(std::move(*errors[i]));
  }
  return out;
}

SynthesisResult synthesize_all_task_knowledge(const std::vector<PreferencePair>& pairs,
                                              Provider& agent, const PromptTemplate& task_know,
                                              const std::string& example, bool chosen_only,
                                              std::size_t jobs) {
  if (pairs.empty()) throw PreconditionError("synthesize_all_task_knowledge: no pairs");
  // Group pairs by task, keeping first-appearance order of tasks.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const PreferencePair*>> by_task;
  for (const auto& p : pairs) {
    auto& v = by_task[p.chosen().task.id];
    if (v.empty()) order.push_back(p.chosen().task.id);
    v.push_back(&p);
  }
  std::vector<std::optional<SynthesizedKnowledge>> slots(order.size());
  std::vector<std::string> reasons(order.size());
  parallel_for(order.size(), jobs, [&](std::size_t i) {
    const auto& candidates = by_task.at(order[i]);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      try {
        slots[i] = SynthesizedKnowledge{
            generate_task_knowledge(agent, *candidates[k], task_know, example, chosen_only), k};
        return;
      } catch (const FormatError& e) {
        reasons[i] += (reasons[i].empty() ? "" : "; ") + std::string("pair ") +
                      std::to_string(k) + ": " + e.what();
      }
    }
  });
  SynthesisResult out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (slots[i]) {
      out.knowledge.emplace(order[i], std::move(*slots[i]));
    } else {
      out.failures.push_back(StageReport{order[i], 0, reasons[i]});
    }
  }
  return out;
}

SummaryResult summarize_states(const Trajectory& expert, Provider& provider,
                               const PromptTemplate& state_know,
                               const std::optional<TaskKnowledge>& task_knowledge,
                               const std::string& example, const WarningSink& warn) {
  if (expert.source != TrajectorySource::kExpert) {
    throw PreconditionError("summarize_states expects an expert trajectory");
  }
  SummaryResult out;
  for (std::size_t t = 0; t < expert.steps.size(); ++t) {
    const std::string history = render_history(expert, t + 1, task_knowledge);
    try {
      out.states.push_back(generate_state_knowledge(provider, history, state_know,
                                                    expert.task.id, t, example, warn));
    } catch (const FormatError& e) {
      out.skipped.push_back(StageReport{expert.task.id, t, e.what()});
    }
  }
  return out;
}

Trajectory annotate(const Trajectory& expert, const std::vector<StateKnowledge>& states) {
  Trajectory out = expert;
  for (const auto& s : states) {
    if (s.task_id != expert.task.id || s.step_index >= out.steps.size()) {
      throw RangeError("state knowledge for " + s.task_id + " step " +
                       std::to_string(s.step_index) + " does not fit trajectory " +
                       expert.task.id);
    }
    out.steps[s.step_index].state_knowledge = s.text;
  }
  return out;
}

KbBuildResult build_kb_records(const Trajectory& expert, const std::vector<StateKnowledge>& states,
                               Provider& embedder) {
  KbBuildResult out;
  const std::size_t n = expert.steps.size();
  for (const auto& s : states) {
    if (s.step_index >= n) {
      throw RangeError("state step " + std::to_string(s.step_index) + " outside trajectory " +
                       expert.task.id);
    }
    if (s.step_index + 1 >= n) continue;
    KBRecord r;
    r.state_text = s.text;
    r.prev_action = expert.steps[s.step_index].action.action_id();
    r.next_action = expert.steps[s.step_index + 1].action.action_id();
    r.task_id = expert.task.id;
    r.step_index = s.step_index;
    if (r.prev_action.empty() || r.next_action.empty()) {
      out.dropped.push_back(StageReport{expert.task.id, s.step_index, "unparseable action"});
      continue;
    }
    try {
      r.state_embedding = embed_text(embedder, s.text);
    } catch (const Error& e) {
      out.dropped.push_back(StageReport{expert.task.id, s.step_index,
                                        std::string("embedding failed: ") + e.what()});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string_view to_string(TrainingTarget t) {
  return t == TrainingTarget::kAgent ? "agent" : "wkm";
}

Json to_json(const TrainingRecord& r) {
  Json spans = Json::array();
  for (const auto& [b, e] : r.mask_spans) spans.push_back(Json::array({b, e}));
  return Json{{"target", to_string(r.target)}, {"full_text", r.full_text}, {"mask_spans", spans}};
}

TrainingRecord training_record_from_json(const Json& j) {
  TrainingRecord r;
  const std::string target = j.at("target").get<std::string>();
  if (target != "agent" && target != "wkm") throw FormatError("unknown training target " + target);
  r.target = target == "agent" ? TrainingTarget::kAgent : TrainingTarget::kWkm;
  r.full_text = j.at("full_text").get<std::string>();
  for (const auto& s : j.at("mask_spans")) {
    r.mask_spans.emplace_back(s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>());
  }
  return r;
}

namespace {

TrainingRecord masked(TrainingTarget target, const RenderedText& rendered,
                      std::initializer_list<BlockLabel> labels) {
  TrainingRecord r;
  r.target = target;
  r.full_text = rendered.text;
  for (const auto& b : rendered.blocks) {
    if (std::find(labels.begin(), labels.end(), b.label) == labels.end()) continue;
    if (!r.mask_spans.empty() && b.begin < r.mask_spans.back().second) {
      throw Error("internal error: overlapping mask spans");
    }
    r.mask_spans.emplace_back(b.begin, b.end);
  }
  return r;
}

}  // namespace

TrainingRecord agent_training_record(const Trajectory& expert, const TaskKnowledge& knowledge) {
  RenderOptions opts;
  opts.task_knowledge = knowledge.text;
  return masked(TrainingTarget::kAgent, render_blocks(expert, expert.steps.size(), opts),
                {BlockLabel::kThought, BlockLabel::kAction});
}

TrainingRecord wkm_training_record(const Trajectory& annotated, const TaskKnowledge& knowledge) {
  RenderOptions opts;
  opts.task_knowledge = knowledge.text;
  opts.include_state_knowledge = true;
  return masked(TrainingTarget::kWkm, render_blocks(annotated, annotated.steps.size(), opts),
                {BlockLabel::kTaskKnowledge, BlockLabel::kStateKnowledge});
}

TrainingCorpora emit_training(const std::vector<Trajectory>& annotated_experts,
                              const std::map<std::string, TaskKnowledge>& knowledge) {
  TrainingCorpora out;
  for (const auto& t : annotated_experts) {
    const auto it = knowledge.find(t.task.id);
    if (it == knowledge.end()) {
      throw PreconditionError("emit_training: no task knowledge for " + t.task.id);
    }
    out.agent.push_back(agent_training_record(t, it->second));
    out.wkm.push_back(wkm_training_record(t, it->second));
  }
  return out;
}

double masked_score(const TrainingRecord& record, const std::vector<double>& per_char_scores) {
  if (per_char_scores.size() != record.full_text.size()) {
    throw PreconditionError("masked_score: " + std::to_string(per_char_scores.size()) +
                            " scores for " + std::to_string(record.full_text.size()) + " bytes");
  }
  double sum = 0.0;
  for (const auto& [b, e] : record.mask_spans) {
    if (b > e || e > per_char_scores.size()) throw RangeError("masked_score: span out of bounds");
    for (std::size_t i = b; i < e; ++i) sum += per_char_scores[i];
  }
  return -sum;
}

}  // namespace wkm
