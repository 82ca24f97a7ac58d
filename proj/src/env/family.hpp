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
#include <memory>
#include <string>
#include <vector>

#include "wkm/env/world.hpp"

namespace wkm::env::detail {

enum class Group { kSeen, kUnseen };

// One cell of a template pool. `object` and `dest` are type names whose
// meaning depends on the template (for shopping: category and color).
struct Combo {
  std::string templ;
  std::string object;
  std::string dest;
  int layout = 0;

  std::string key() const;
};

struct BuiltTask {
  WorldState world;
  std::string instruction;
  std::string observation;
  std::vector<std::string> plan;
  std::vector<std::string> rationales;
};

class Family {
 public:
  virtual ~Family() = default;
  // Canonical enumeration order; the suite generator shuffles it.
  virtual std::vector<Combo> pool(Group group) const = 0;
  // target_seed fixes everything the oracle plan depends on;
  // distractor_seed only the rest of the scene.
  virtual BuiltTask build(const Combo& combo, Group group, std::uint64_t target_seed,
                          std::uint64_t distractor_seed) const = 0;
};

std::unique_ptr<Family> make_household(std::uint64_t suite_seed);
std::unique_ptr<Family> make_science(std::uint64_t suite_seed);
std::unique_ptr<Family> make_shopping(std::uint64_t suite_seed);

// Records an oracle plan by executing every action on a private copy of
// the world; an action that the simulator rejects is a generator bug.
class PlanRecorder {
 public:
  explicit PlanRecorder(const WorldState& start);

  void emit(const std::string& action, std::string rationale);

  // Physical-world helpers. Navigation routes through the hallway hub in
  // multi-room worlds.
  void go_to(int receptacle, const std::string& why);
  void open_if_closed(int receptacle);
  void fetch(int object, const std::string& why);
  void deliver(int object, int receptacle, const std::string& why);

  const WorldState& sim() const noexcept { return sim_; }
  std::vector<std::string> plan;
  std::vector<std::string> rationales;

 private:
  WorldState sim_;
};

}  // namespace wkm::env::detail
