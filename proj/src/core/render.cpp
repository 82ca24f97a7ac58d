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

#include "wkm/core/render.hpp"

#include "wkm/common/error.hpp"

namespace wkm {

std::string_view label_text(BlockLabel label) {
  switch (label) {
    case BlockLabel::kTaskInstruction: return "Task Instruction";
    case BlockLabel::kTaskKnowledge: return "Task Knowledge";
    case BlockLabel::kThought: return "Thought";
    case BlockLabel::kAction: return "Action";
    case BlockLabel::kObservation: return "Observation";
    case BlockLabel::kStateKnowledge: return "State Knowledge";
  }
  return "";
}

HistoryWriter::HistoryWriter(std::string_view instruction) {
  append(BlockLabel::kTaskInstruction, instruction, 0);
}

void HistoryWriter::append(BlockLabel label, std::string_view content, std::size_t step) {
  RenderedBlock block{label, out_.text.size(), 0, step};
  out_.text += label_text(label);
  out_.text += ": ";
  out_.text += content;
  block.end = out_.text.size();
  out_.text += '\n';
  out_.blocks.push_back(block);
}

void HistoryWriter::task_knowledge(std::string_view text) {
  append(BlockLabel::kTaskKnowledge, text, 0);
}

void HistoryWriter::thought(std::string_view text) {
  if (has_action_) ++step_;
  has_action_ = false;
  if (!text.empty()) append(BlockLabel::kThought, text, step_);
}

void HistoryWriter::action(std::string_view text) {
  if (has_action_) ++step_;
  has_action_ = true;
  append(BlockLabel::kAction, text, step_);
}

void HistoryWriter::observation(std::string_view text) {
  if (!text.empty()) append(BlockLabel::kObservation, text, step_);
}

void HistoryWriter::state_knowledge(std::string_view text) {
  append(BlockLabel::kStateKnowledge, text, step_);
}

RenderedText render_blocks(const Trajectory& traj, std::size_t upto_step,
                           const RenderOptions& options) {
  if (upto_step > traj.steps.size()) {
    throw RangeError("render_history: upto_step " + std::to_string(upto_step) +
                     " exceeds " + std::to_string(traj.steps.size()) + " steps");
  }
  HistoryWriter w(traj.task.text);
  if (options.task_knowledge) w.task_knowledge(*options.task_knowledge);
  for (std::size_t i = 0; i < upto_step; ++i) {
    const Step& s = traj.steps[i];
    w.thought(s.action.rationale());
    w.action(s.action.action_text());
    w.observation(s.observation);
    if (options.include_state_knowledge && s.state_knowledge) {
      w.state_knowledge(*s.state_knowledge);
    }
  }
  return w.rendered();
}

std::string render_history(const Trajectory& traj, std::size_t upto_step,
                           const std::optional<TaskKnowledge>& task_knowledge) {
  RenderOptions opts;
  if (task_knowledge) opts.task_knowledge = task_knowledge->text;
  return render_blocks(traj, upto_step, opts).text;
}

}  // namespace wkm
