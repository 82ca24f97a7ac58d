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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/provider/provider.hpp"

namespace wkm {

struct ScriptedPlan {
  std::vector<std::string> actions;
  std::vector<std::string> rationales;  // optional, aligned with actions
};

// Tables driving a ScriptedProvider. Every field is optional.
struct ScriptedConfig {
  ProviderRole role = ProviderRole::kAgent;
  std::uint64_t seed = 0;

  // Instruction text -> plan the agent follows step by step.
  std::map<std::string, ScriptedPlan> plans;
  // Score mass on the plan's next action; the rest is spread evenly.
  double plan_mass = 1.0;

  // Static per-action scores, keyed by canonical action id.
  std::map<std::string, double> action_table;
  // Conditional probability of the last token of a space-joined token path
  // given the tokens before it ("go" , "go to", "go to desk", ...). The
  // end-of-action token is "</s>".
  std::map<std::string, double> token_table;

  // Canned completions: the first rule whose `contains` occurs in the
  // prompt answers it verbatim.
  struct Completion {
    std::string contains;
    std::string text;
  };
  std::vector<Completion> completions;

  // Instructions on which the agent only ever emits `sabotage_action`.
  std::vector<std::string> sabotage;
  // Additionally sabotage this fraction of instructions, chosen by hash.
  double sabotage_fraction = 0.0;
  std::string sabotage_action = "look around";

  std::size_t dimension = 64;

  static ScriptedConfig from_json(const Json& j);
};

inline constexpr std::string_view kEndOfAction = "</s>";

// Deterministic provider for hermetic runs. Answers are pure functions of
// (tables, seed, prompt, temperature), so concurrent use is safe.
//
// Prompt handling for generate():
//   canned completion match            -> that text
//   contains "Success Trajectory:"     -> task knowledge from the success run
//   contains the state answer format   -> summary of the trajectory's history
//   ends with "Task Knowledge:"        -> task knowledge from the instruction
//   otherwise (agent)                  -> Thought/Action for the next step
class ScriptedProvider final : public Provider {
 public:
  explicit ScriptedProvider(ScriptedConfig config);

  ProviderRole role() const override { return config_.role; }

  std::string generate(const std::string& prompt, std::size_t max_chars,
                       double temperature) override;
  std::vector<double> score_actions(const std::string& prompt,
                                    const std::vector<std::string>& actions) override;
  Embedding embed(const std::string& text) override;

  const ScriptedConfig& config() const noexcept { return config_; }

 private:
  bool sabotaged(const std::string& instruction) const;
  std::string next_action_completion(const std::string& prompt, double temperature) const;
  std::vector<double> token_scores(const std::vector<std::string>& actions) const;

  ScriptedConfig config_;
};

// Signed 64-bucket (by default) feature hash over lowercase alphanumeric
// word tokens.
Embedding feature_hash_embedding(std::string_view text, std::size_t dimension);

// Parsed view of a rendered history: the last instruction block and the
// action/observation lines after it.
struct ParsedHistory {
  std::string instruction;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
};

ParsedHistory parse_rendered_history(std::string_view text);

// The scripted summary of a history: the goal, the places visited so far,
// where the agent is and what it carries. Depends on the action sequence and
// the goal sentence only.
std::string scripted_state_summary(const ParsedHistory& h);

}  // namespace wkm
