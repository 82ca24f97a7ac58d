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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/core/action.hpp"
#include "wkm/core/knowledge.hpp"
#include "wkm/core/trajectory.hpp"
#include "wkm/provider/provider.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm {

inline constexpr std::size_t kStateKnowledgeMaxChars = 700;
inline constexpr std::size_t kTaskKnowledgeMaxChars = 4000;
inline constexpr std::size_t kActionMaxChars = 1000;

using WarningSink = std::function<void(const std::string&)>;

// Logs through the process-wide logger.
void log_warning(const std::string& message);

// Text after the last occurrence of `marker`, trimmed. Throws FormatError
// carrying the raw completion when the marker is absent or the answer
// is empty.
std::string text_after_marker(std::string_view completion, std::string_view marker);

// Synthesizes task knowledge by contrasting the pair's trajectories. The
// provider must hold the agent role. With `chosen_only` the rejected
// trajectory is left out of the prompt.
TaskKnowledge generate_task_knowledge(Provider& agent, const PreferencePair& pair,
                                      const PromptTemplate& task_know,
                                      std::string_view example = {}, bool chosen_only = false);

// Plan-time task knowledge: the prompt is the instruction block followed by
// an open "Task Knowledge:" cue. A completion that repeats the marker is
// parsed after it; otherwise the whole completion is the answer.
TaskKnowledge generate_task_knowledge(Provider& wkm, const TaskInstruction& task);

// Summarizes the rendered history `history`. Answers longer than
// kStateKnowledgeMaxChars are cut to that length and reported to `warn`.
StateKnowledge generate_state_knowledge(Provider& provider, std::string_view history,
                                        const PromptTemplate& state_know, std::string task_id,
                                        std::size_t step_index, std::string_view example = {},
                                        const WarningSink& warn = log_warning);

// Per-action raw scores for `prompt` over `actions`. Throws
// PreconditionError for an empty action list or a non-agent provider and
// FormatError when the provider's answer violates the score contract.
ActionScores score_actions(Provider& agent, const std::string& prompt,
                           const std::vector<std::string>& actions);

// Throws PreconditionError for empty text and FormatError for a
// non-finite or empty vector.
Embedding embed_text(Provider& provider, const std::string& text);

// Parses "Thought: ...\nAction: ..." completions. A completion without an
// Action line yields ActionRecord::unparseable.
ActionRecord parse_action_completion(std::string_view completion);

ActionRecord propose_action(Provider& agent, const std::string& prompt, double temperature);

}  // namespace wkm
