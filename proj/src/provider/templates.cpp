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

#include "wkm/provider/templates.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "wkm/common/error.hpp"
#include "wkm/common/json.hpp"

namespace wkm {

namespace {

const std::vector<std::string>& required(TemplateName n) {
  static const std::vector<std::string> kTask = {"example", "success_trajectory",
                                                 "explored_trajectory"};
  static const std::vector<std::string> kState = {"example", "trajectory"};
  static const std::vector<std::string> kPlan = {"example", "history"};
  switch (n) {
    case TemplateName::kTaskKnow: return kTask;
    case TemplateName::kStateKnow: return kState;
    case TemplateName::kPlan: return kPlan;
  }
  return kPlan;
}

const std::set<std::string> kKnownPlaceholders = {
    "success_trajectory", "explored_trajectory", "trajectory", "history", "example"};

// Placeholder names in order of appearance. Braces that do not enclose a
// known name are literal text.
std::vector<std::string> scan(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = text.find('{'); i != std::string_view::npos; i = text.find('{', i + 1)) {
    const std::size_t close = text.find('}', i);
    if (close == std::string_view::npos) break;
    std::string name(text.substr(i + 1, close - i - 1));
    if (kKnownPlaceholders.count(name)) out.push_back(std::move(name));
  }
  return out;
}

constexpr std::string_view kTaskKnowText =
    "Below are two attempts at the same text-based task: one that succeeded and one produced "
    "while exploring. Compare them to find what made the difference, then write task knowledge "
    "that would help a future attempt succeed.\n"
    "\n"
    "Success Trajectory:\n{success_trajectory}\n"
    "\n"
    "Explored Trajectory:\n{explored_trajectory}\n"
    "\n"
    "Task knowledge says what to do for which kind of task. An example:\n"
    "{example}\n"
    "\n"
    "Keep it short. Put your answer in this format: Task Knowledge: When ... you should (or "
    "should not) ... The action workflows are: ...\n";

constexpr std::string_view kStateKnowText =
    "The following is part of a trajectory from a text-based task. Describe the current state "
    "of the task briefly, in terms that would carry over to other runs of the same task.\n"
    "An example:\n"
    "{example}\n"
    "\n"
    "The trajectory:\n{trajectory}\n"
    "Stay within 128 tokens.\n"
    "Put your answer in this format:\n"
    "State Knowledge: ...\n";

constexpr std::string_view kPlanText =
    "Solve the task by interacting with a text environment. Every turn, answer with one line "
    "starting with \"Thought:\" and one line starting with \"Action:\". Only use actions the "
    "environment accepts.\n"
    "An example:\n"
    "{example}\n"
    "\n"
    "Now it is your turn.\n"
    "{history}";

constexpr std::string_view kTaskKnowExample =
    "Task Knowledge: When looking for a cooled object, you should check the countertops and "
    "shelves first and should not open every drawer. The action workflows are: 1) go to each "
    "likely receptacle until the object is found 2) take the object 3) go to the fridge and "
    "cool the object 4) go to the destination and put the object there.";

constexpr std::string_view kStateKnowExample =
    "State Knowledge: My task is to put a cool apple in the microwave. I have checked the "
    "countertop 1 and the fridge 1. I am holding nothing yet.";

constexpr std::string_view kPlanExample =
    "Thought: The mug is most likely on a countertop.\n"
    "Action: go to countertop 1\n"
    "Observation: On the countertop 1, you see a mug 1.\n"
    "Thought: Now I take the mug.\n"
    "Action: take mug 1 from countertop 1\n"
    "Observation: You pick up the mug 1 from the countertop 1.";

constexpr std::string_view kExploredSection = "Explored Trajectory:\n{explored_trajectory}\n\n";

}  // namespace

std::string_view to_string(TemplateName n) {
  switch (n) {
    case TemplateName::kTaskKnow: return "task_know";
    case TemplateName::kStateKnow: return "state_know";
    case TemplateName::kPlan: return "plan";
  }
  return "plan";
}

TemplateName parse_template_name(std::string_view s) {
  if (s == "task_know") return TemplateName::kTaskKnow;
  if (s == "state_know") return TemplateName::kStateKnow;
  if (s == "plan") return TemplateName::kPlan;
  throw ConfigError("unknown template name: " + std::string(s));
}

PromptTemplate::PromptTemplate(TemplateName name, std::string text)
    : PromptTemplate(name, std::move(text), false) {}

PromptTemplate::PromptTemplate(TemplateName name, std::string text, bool chosen_only)
    : name_(name), text_(std::move(text)), chosen_only_(chosen_only) {
  const std::vector<std::string> found = scan(text_);
  std::vector<std::string> want = required(name_);
  if (chosen_only_) std::erase(want, "explored_trajectory");
  const std::string label(to_string(name_));
  for (const auto& w : want) {
    const auto n = std::count(found.begin(), found.end(), w);
    if (n != 1) {
      throw ConfigError(label + " template must contain {" + w + "} exactly once, found " +
                        std::to_string(n));
    }
  }
  for (const auto& f : found) {
    if (std::find(want.begin(), want.end(), f) == want.end()) {
      throw ConfigError(label + " template has unexpected placeholder {" + f + "}");
    }
  }
  if (name_ == TemplateName::kTaskKnow &&
      text_.find(kTaskKnowledgeDirective) == std::string::npos) {
    throw ConfigError("task_know template lacks the \"Task Knowledge: When ...\" directive");
  }
}

std::string_view builtin_example(TemplateName name) {
  switch (name) {
    case TemplateName::kTaskKnow: return kTaskKnowExample;
    case TemplateName::kStateKnow: return kStateKnowExample;
    case TemplateName::kPlan: return kPlanExample;
  }
  return {};
}

PromptTemplate PromptTemplate::builtin(TemplateName name) {
  switch (name) {
    case TemplateName::kTaskKnow: return PromptTemplate(name, std::string(kTaskKnowText));
    case TemplateName::kStateKnow: return PromptTemplate(name, std::string(kStateKnowText));
    case TemplateName::kPlan: return PromptTemplate(name, std::string(kPlanText));
  }
  throw ConfigError("unknown template");
}

std::string PromptTemplate::fill(const std::map<std::string, std::string>& values) const {
  std::string out;
  std::size_t pos = 0;
  while (pos < text_.size()) {
    const std::size_t open = text_.find('{', pos);
    if (open == std::string::npos) break;
    const std::size_t close = text_.find('}', open);
    if (close == std::string::npos) break;
    const std::string name = text_.substr(open + 1, close - open - 1);
    if (!kKnownPlaceholders.count(name)) {
      out.append(text_, pos, open + 1 - pos);
      pos = open + 1;
      continue;
    }
    const auto it = values.find(name);
    if (it == values.end()) throw PreconditionError("no value for placeholder {" + name + "}");
    out.append(text_, pos, open - pos);
    out += it->second;
    pos = close + 1;
  }
  out.append(text_, pos);
  return out;
}

PromptTemplate PromptTemplate::chosen_only() const {
  if (name_ != TemplateName::kTaskKnow) {
    throw PreconditionError("chosen_only applies to the task_know template");
  }
  if (chosen_only_) return *this;
  std::string text = text_;
  const std::size_t at = text.find(kExploredSection);
  if (at == std::string::npos) {
    throw ConfigError("task_know template has no removable explored-trajectory block");
  }
  text.erase(at, kExploredSection.size());
  return PromptTemplate(name_, std::move(text), true);
}

std::map<TemplateName, PromptTemplate> load_templates(const std::filesystem::path& dir) {
  std::map<TemplateName, PromptTemplate> out;
  for (TemplateName n : {TemplateName::kTaskKnow, TemplateName::kStateKnow, TemplateName::kPlan}) {
    const auto path = dir / (std::string(to_string(n)) + ".txt");
    if (!dir.empty() && std::filesystem::exists(path)) {
      out.emplace(n, PromptTemplate(n, read_text_file(path)));
    } else {
      out.emplace(n, PromptTemplate::builtin(n));
    }
  }
  return out;
}

}  // namespace wkm
