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
#include <string>
#include <string_view>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/core/action.hpp"
#include "wkm/core/trajectory.hpp"

namespace wkm::env {

inline constexpr std::string_view kNothingHappens = "Nothing happens.";

enum class RewardMode { kBinary, kDense };

std::string_view to_string(RewardMode m);
RewardMode parse_reward_mode(std::string_view s);

int default_max_steps(EnvKind kind);
RewardMode default_reward_mode(EnvKind kind);

struct EnvConfig {
  EnvKind kind = EnvKind::kHousehold;
  std::uint64_t seed = 0;
  int max_steps = 40;
  RewardMode reward_mode = RewardMode::kBinary;

  static EnvConfig defaults(EnvKind kind, std::uint64_t seed);
  // Throws ConfigError: max_steps must be positive, and within [10, 120]
  // for science.
  void validate() const;
};

// What an appliance receptacle can do to an object held at it.
enum class Capability { kNone, kClean, kHeat, kCool };

struct Room {
  std::string name;
};

struct Receptacle {
  std::string name;  // "cabinet 1"
  std::string type;  // "cabinet"
  int room = 0;
  bool openable = false;
  bool is_open = true;
  Capability capability = Capability::kNone;
};

struct Object {
  std::string name;  // "soapbar 1"
  std::string type;  // "soapbar"
  int receptacle = -1;  // -1 while held
  bool takeable = true;
  bool light_source = false;  // household lamps
  bool measuring_tool = false;  // science thermometer
  bool clean = false;
  bool heated = false;
  bool cooled = false;
  bool examined = false;
};

struct Product {
  std::string id;  // "b0412"
  std::string category;
  std::string color;
  std::vector<std::string> colors;
  std::vector<std::string> sizes;
  int price = 0;
};

enum class ShopPage { kHome, kResults, kProduct, kConfirmation };

struct Shop {
  std::vector<std::string> categories;
  std::vector<Product> products;
  ShopPage page = ShopPage::kHome;
  std::string query;
  int product = -1;
  std::string selected_color;
  std::string selected_size;
  bool purchased = false;
};

enum class SubgoalKind {
  kHolding,      // object held
  kFlag,         // object carries flag
  kInReceptacle, // object inside a receptacle of `value` type, with flag
  kInRoom,       // agent in room
  kSearched,     // shop query == value
  kViewing,      // shop product page for product
  kColorChosen,  // viewing product with color == value
  kSizeChosen,   // viewing product with size == value
  kPurchased,    // bought product with the required options
};

enum class ObjectFlag { kNone, kClean, kHeated, kCooled, kExamined };

struct Subgoal {
  SubgoalKind kind = SubgoalKind::kHolding;
  int object = -1;
  int room = -1;
  int product = -1;
  ObjectFlag flag = ObjectFlag::kNone;
  std::string value;
  std::string color;  // kPurchased
  std::string size;   // kPurchased
  // The goal predicate is the conjunction of the terminal subgoals.
  bool terminal = false;
};

// Full simulator state for one episode. Value type; copying forks the
// episode.
struct WorldState {
  EnvKind kind = EnvKind::kHousehold;
  int max_steps = 40;
  RewardMode reward_mode = RewardMode::kBinary;

  std::vector<Room> rooms;
  std::vector<Receptacle> receptacles;
  std::vector<Object> objects;
  int agent_room = 0;
  int agent_at = -1;   // receptacle index, -1 when standing in the room
  int inventory = -1;  // object index, at most one held object
  Shop shop;

  std::vector<Subgoal> subgoals;
  std::vector<bool> achieved;  // latched per subgoal

  // Episode bookkeeping: advances on every step, valid or not.
  int steps_taken = 0;
  bool done = false;
  double reward = 0.0;

  int find_receptacle(std::string_view name) const;
  int find_object(std::string_view name) const;
  int find_room(std::string_view name) const;
  int find_product(std::string_view id) const;

  bool holds(const Subgoal& g) const;
  bool goal_satisfied() const;
};

// Serialization of the world proper, excluding episode bookkeeping. An
// invalid action leaves this byte-identical.
Json world_json(const WorldState& s);
// world_json plus steps_taken, done and reward.
Json state_json(const WorldState& s);

struct StepOutcome {
  std::string observation;
  bool done = false;
  double reward_so_far = 0.0;
  bool was_valid = false;
};

// Applies one action. Invalid actions (including unparseable ones) answer
// "Nothing happens." and leave the world unchanged; they still consume a
// step. Throws PreconditionError when the episode is already done.
StepOutcome step(WorldState& state, const ActionRecord& action);

// Every grammatical instantiation of the kind's action templates over the
// entities of this world: the task's available action set. Fixed for the
// lifetime of an episode; includes actions that are invalid in a given
// state.
std::vector<std::string> enumerate_actions(const WorldState& state);

std::vector<std::string> action_templates(EnvKind kind);

// "a book 1, a laptop 1, and a pillow 1" / "nothing"
std::string list_with_articles(const std::vector<std::string>& names);

}  // namespace wkm::env
