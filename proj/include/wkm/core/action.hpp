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

#include <string>
#include <string_view>

namespace wkm {

// Lowercases ASCII letters, collapses whitespace runs to a single space and
// trims both ends. Idempotent. Throws PreconditionError when the input has
// no non-whitespace character.
std::string canonical_action_id(std::string_view action_text);

// One agent move: the free-text rationale that precedes it plus the action
// itself. action_id is derived from action_text and never set directly.
class ActionRecord {
 public:
  ActionRecord() = default;
  ActionRecord(std::string rationale, std::string action_text);

  // A completion from which no action could be recovered. The environment
  // answers such a record with the invalid-action observation.
  static ActionRecord unparseable(std::string rationale);

  const std::string& rationale() const noexcept { return rationale_; }
  const std::string& action_text() const noexcept { return action_text_; }
  const std::string& action_id() const noexcept { return action_id_; }
  bool parse_failed() const noexcept { return action_text_.empty(); }

  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;

 private:
  std::string rationale_;
  std::string action_text_;
  std::string action_id_;
};

}  // namespace wkm
