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

#include "wkm/provider/operations.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "wkm/common/error.hpp"
#include "wkm/core/render.hpp"

namespace wkm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void require_role(const Provider& p, ProviderRole role, std::string_view op) {
  if (p.role() != role) {
    throw PreconditionError(std::string(op) + " requires a provider with the " +
                            std::string(to_string(role)) + " role");
  }
}

std::string render_whole(const Trajectory& t) { return render_history(t, t.steps.size()); }

TaskKnowledge checked_task_knowledge(std::string task_id, std::string text,
                                     std::string_view raw) {
  if (text.rfind("When", 0) != 0) {
    throw FormatError("task knowledge must begin with \"When\"", std::string(raw));
  }
  return TaskKnowledge{std::move(task_id), std::move(text)};
}

}  // namespace

void log_warning(const std::string& message) { spdlog::warn("{}", message); }

std::string text_after_marker(std::string_view completion, std::string_view marker) {
  const auto at = completion.rfind(marker);
  if (at == std::string_view::npos) {
    throw FormatError("completion lacks \"" + std::string(marker) + "\"", std::string(completion));
  }
  const std::string_view body = trim(completion.substr(at + marker.size()));
  if (body.empty()) {
    throw FormatError("completion has an empty answer after \"" + std::string(marker) + "\"",
                      std::string(completion));
  }
  return std::string(body);
}

TaskKnowledge generate_task_knowledge(Provider& agent, const PreferencePair& pair,
                                      const PromptTemplate& task_know, std::string_view example,
                                      bool chosen_only) {
  require_role(agent, ProviderRole::kAgent, "generate_task_knowledge");
  const PromptTemplate tpl = chosen_only ? task_know.chosen_only() : task_know;
  std::map<std::string, std::string> values = {
      {"example", std::string(example)},
      {"success_trajectory", render_whole(pair.chosen())},
  };
  if (!chosen_only) values["explored_trajectory"] = render_whole(pair.rejected());
  const std::string completion =
      agent.generate(tpl.fill(values), kTaskKnowledgeMaxChars, kExploreTemperature);
  return checked_task_knowledge(pair.chosen().task.id,
                                text_after_marker(completion, "Task Knowledge:"), completion);
}

TaskKnowledge generate_task_knowledge(Provider& wkm, const TaskInstruction& task) {
  require_role(wkm, ProviderRole::kWkm, "generate_task_knowledge");
  HistoryWriter w(task.text);
  const std::string prompt = w.text() + "Task Knowledge:";
  const std::string completion = wkm.generate(prompt, kTaskKnowledgeMaxChars, kWkmTemperature);
  std::string text = completion.find("Task Knowledge:") != std::string::npos
                         ? text_after_marker(completion, "Task Knowledge:")
                         : std::string(trim(completion));
  return checked_task_knowledge(task.id, std::move(text), completion);
}

StateKnowledge generate_state_knowledge(Provider& provider, std::string_view history,
                                        const PromptTemplate& state_know, std::string task_id,
                                        std::size_t step_index, std::string_view example,
                                        const WarningSink& warn) {
  const std::string prompt =
      state_know.fill({{"example", std::string(example)}, {"trajectory", std::string(history)}});
  const std::string completion = provider.generate(prompt, kStateKnowledgeMaxChars,
                                                   provider.role() == ProviderRole::kWkm
                                                       ? kWkmTemperature
                                                       : kExploreTemperature);
  std::string text = text_after_marker(completion, "State Knowledge:");
  if (text.size() > kStateKnowledgeMaxChars) {
    // Cut on a UTF-8 boundary.
    std::size_t cut = kStateKnowledgeMaxChars;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    if (warn) {
      warn("state knowledge for " + task_id + " step " + std::to_string(step_index) + " was " +
           std::to_string(text.size()) + " characters; truncated to " + std::to_string(cut));
    }
    text.resize(cut);
  }
  return StateKnowledge{std::move(task_id), step_index, std::move(text)};
}

ActionScores score_actions(Provider& agent, const std::string& prompt,
                           const std::vector<std::string>& actions) {
  require_role(agent, ProviderRole::kAgent, "score_actions");
  if (actions.empty()) throw PreconditionError("score_actions: empty action list");
  std::vector<double> scores = agent.score_actions(prompt, actions);
  if (scores.size() != actions.size()) {
    throw FormatError("provider returned " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(actions.size()) + " actions");
  }
  bool positive = false;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0) throw FormatError("provider returned an invalid score");
    positive = positive || s > 0.0;
  }
  if (!positive) throw FormatError("provider returned no positive score");
  return ActionScores{actions, std::move(scores)};
}

Embedding embed_text(Provider& provider, const std::string& text) {
  if (text.empty()) throw PreconditionError("embed: empty text");
  Embedding v = provider.embed(text);
  if (v.empty()) throw FormatError("provider returned an empty embedding");
  for (double x : v) {
    if (!std::isfinite(x)) throw FormatError("provider returned a non-finite embedding");
  }
  return v;
}

ActionRecord parse_action_completion(std::string_view completion) {
  std::string thought;
  std::string action;
  std::size_t pos = 0;
  while (pos <= completion.size()) {
    std::size_t nl = completion.find('\n', pos);
    if (nl == std::string_view::npos) nl = completion.size();
    const std::string_view line = trim(completion.substr(pos, nl - pos));
    if (line.rfind("Thought:", 0) == 0 && thought.empty()) {
      thought = std::string(trim(line.substr(8)));
    } else if (line.rfind("Action:", 0) == 0) {
      action = std::string(trim(line.substr(7)));
      break;
    }
    pos = nl + 1;
  }
  if (action.empty()) return ActionRecord::unparseable(std::move(thought));
  return ActionRecord(std::move(thought), std::move(action));
}

ActionRecord propose_action(Provider& agent, const std::string& prompt, double temperature) {
  require_role(agent, ProviderRole::kAgent, "propose_action");
  return parse_action_completion(agent.generate(prompt, kActionMaxChars, temperature));
}

}  // namespace wkm
