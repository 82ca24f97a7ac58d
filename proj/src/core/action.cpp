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

#include "wkm/core/action.hpp"

#include "wkm/common/error.hpp"

namespace wkm {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string canonical_action_id(std::string_view action_text) {
  std::string out;
  out.reserve(action_text.size());
  bool pending_space = false;
  for (char c : action_text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  if (out.empty()) throw PreconditionError("canonical_action_id: empty action text");
  return out;
}

ActionRecord::ActionRecord(std::string rationale, std::string action_text)
    : rationale_(std::move(rationale)), action_text_(std::move(action_text)) {
  action_id_ = canonical_action_id(action_text_);
}

ActionRecord ActionRecord::unparseable(std::string rationale) {
  ActionRecord r;
  r.rationale_ = std::move(rationale);
  return r;
}

}  // namespace wkm
