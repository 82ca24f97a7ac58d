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

#include "family.hpp"

#include "wkm/common/error.hpp"

namespace wkm::env::detail {

std::string Combo::key() const {
  return templ + "|" + object + "|" + dest + "|" + std::to_string(layout);
}

PlanRecorder::PlanRecorder(const WorldState& start) : sim_(start) {
  sim_.max_steps = 1 << 20;
}

void PlanRecorder::emit(const std::string& action, std::string rationale) {
  const StepOutcome out = step(sim_, ActionRecord(rationale, action));
  if (!out.was_valid) throw Error("oracle plan generator emitted invalid action: " + action);
  plan.push_back(action);
  rationales.push_back(std::move(rationale));
}

void PlanRecorder::go_to(int r, const std::string& why) {
  // Copies: emit() replaces the simulated world.
  const Receptacle rec = sim_.receptacles[r];
  if (sim_.kind == EnvKind::kScience && sim_.agent_room != rec.room) {
    const std::string target_room = sim_.rooms[rec.room].name;
    if (sim_.agent_room != 0) {
      emit("go to " + sim_.rooms[0].name, "I need to get to the " + target_room +
                                              ", so I should go back to the hallway first.");
    }
    if (rec.room != 0) emit("go to " + target_room, why);
  }
  if (sim_.agent_at != r) emit("go to " + rec.name, why);
}

void PlanRecorder::open_if_closed(int r) {
  const Receptacle rec = sim_.receptacles[r];
  if (rec.openable && !rec.is_open) {
    emit("open " + rec.name, "The " + rec.name + " is closed. I should open it.");
  }
}

void PlanRecorder::fetch(int o, const std::string& why) {
  const int r = sim_.objects[o].receptacle;
  const std::string name = sim_.objects[o].name;
  go_to(r, why);
  open_if_closed(r);
  emit("take " + name + " from " + sim_.receptacles[r].name,
       "I found the " + name + ". I should pick it up.");
}

void PlanRecorder::deliver(int o, int r, const std::string& why) {
  go_to(r, why);
  open_if_closed(r);
  emit("put " + sim_.objects[o].name + " in/on " + sim_.receptacles[r].name,
       "Now I can put the " + sim_.objects[o].name + " in/on the " + sim_.receptacles[r].name +
           ".");
}

}  // namespace wkm::env::detail
