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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/core/knowledge.hpp"
#include "wkm/core/trajectory.hpp"

namespace wkm {

enum class BlockLabel {
  kTaskInstruction,
  kTaskKnowledge,
  kThought,
  kAction,
  kObservation,
  kStateKnowledge,
};

// "Task Instruction", "Thought", ... (without the colon).
std::string_view label_text(BlockLabel label);

// Byte range [begin, end) of one rendered block: the label, the ": "
// separator and the content. The terminating newline is not included.
struct RenderedBlock {
  BlockLabel label;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t step = 0;  // owning step for per-step blocks, 0 otherwise
};

struct RenderedText {
  std::string text;
  std::vector<RenderedBlock> blocks;
};

struct RenderOptions {
  std::optional<std::string> task_knowledge;
  // Interleave each step's state knowledge after its observation.
  bool include_state_knowledge = false;
};

// Renders the instruction, optional task knowledge, then the first
// `upto_step` steps as labeled one-line blocks. Empty rationales and empty
// observations produce no block. Throws RangeError when upto_step exceeds
// the number of steps.
RenderedText render_blocks(const Trajectory& traj, std::size_t upto_step,
                           const RenderOptions& options = {});

std::string render_history(const Trajectory& traj, std::size_t upto_step,
                           const std::optional<TaskKnowledge>& task_knowledge = std::nullopt);

// Incremental form used by the planner: appends blocks to an existing
// rendering so per-step prompts do not re-render the whole history.
class HistoryWriter {
 public:
  explicit HistoryWriter(std::string_view instruction);

  void task_knowledge(std::string_view text);
  void thought(std::string_view text);
  void action(std::string_view text);
  void observation(std::string_view text);
  void state_knowledge(std::string_view text);

  const RenderedText& rendered() const noexcept { return out_; }
  const std::string& text() const noexcept { return out_.text; }

 private:
  void append(BlockLabel label, std::string_view content, std::size_t step);

  RenderedText out_;
  std::size_t step_ = 0;
  bool has_action_ = false;
};

}  // namespace wkm
