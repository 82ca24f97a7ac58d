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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace wkm {

enum class TemplateName { kTaskKnow, kStateKnow, kPlan };

std::string_view to_string(TemplateName n);
TemplateName parse_template_name(std::string_view s);

// Prompt text with {placeholder} slots. Placeholders per template:
//   task_know:  example, success_trajectory, explored_trajectory
//   state_know: example, trajectory
//   plan:       example, history
class PromptTemplate {
 public:
  // Throws ConfigError when a required placeholder is missing or repeated,
  // an unknown placeholder appears, or the task_know text lacks the
  // answer-format directive.
  PromptTemplate(TemplateName name, std::string text);

  static PromptTemplate builtin(TemplateName name);

  TemplateName name() const noexcept { return name_; }
  const std::string& text() const noexcept { return text_; }

  // Substitutes every placeholder; all required values must be supplied.
  std::string fill(const std::map<std::string, std::string>& values) const;

  // The task_know template with its explored-trajectory block removed.
  PromptTemplate chosen_only() const;

 private:
  PromptTemplate(TemplateName name, std::string text, bool chosen_only);

  TemplateName name_;
  std::string text_;
  bool chosen_only_ = false;
};

// Short demonstration text for a template's {example} slot.
std::string_view builtin_example(TemplateName name);

inline constexpr std::string_view kTaskKnowledgeDirective = "Task Knowledge: When ...";

// Markers that identify a prompt's purpose to scripted providers and
// delimit answers in completions.
inline constexpr std::string_view kSuccessBlock = "Success Trajectory:";
inline constexpr std::string_view kExploredBlock = "Explored Trajectory:";
inline constexpr std::string_view kStateAnswerFormat = "State Knowledge: ...";

// Loads templates from a directory holding task_know.txt, state_know.txt
// and plan.txt; files that are absent fall back to the built-ins.
std::map<TemplateName, PromptTemplate> load_templates(const std::filesystem::path& dir);

}  // namespace wkm
