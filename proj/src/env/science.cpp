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

#include <algorithm>
#include <map>

#include "family.hpp"
#include "wkm/common/error.hpp"
#include "wkm/common/random.hpp"

namespace wkm::env::detail {

namespace {

struct Fixture {
  const char* name;  // receptacle type; instance is always 1
  bool openable;
  Capability capability;
};

struct RoomPlan {
  const char* name;
  std::vector<Fixture> fixtures;
};

const RoomPlan kHallway{"hallway", {{"coat rack", false, Capability::kNone}}};
const RoomPlan kKitchen{"kitchen",
                        {{"stove", false, Capability::kHeat},
                         {"freezer", false, Capability::kCool},
                         {"sink", false, Capability::kClean},
                         {"counter", false, Capability::kNone},
                         {"cupboard", true, Capability::kNone}}};
const std::vector<RoomPlan>& extra_rooms() {
  static const std::vector<RoomPlan> kRooms = {
      {"workshop", {{"table", false, Capability::kNone},
                    {"toolbox", true, Capability::kNone},
                    {"workbench", false, Capability::kNone}}},
      {"greenhouse", {{"planter", false, Capability::kNone},
                      {"flower pot", false, Capability::kNone}}},
      {"bathroom", {{"bathtub", false, Capability::kNone},
                    {"medicine cabinet", true, Capability::kNone}}},
      {"living room", {{"sofa", false, Capability::kNone},
                       {"bookcase", false, Capability::kNone}}},
      {"bedroom", {{"nightstand", false, Capability::kNone},
                   {"wardrobe", true, Capability::kNone}}},
  };
  return kRooms;
}

struct Template {
  const char* name;
  Group group;
  std::vector<std::string> objects;
  bool needs_dest;
};

const std::vector<Template>& templates() {
  static const std::vector<Template> kTemplates = {
      {"heat_and_move", Group::kSeen, {"chocolate", "butter", "wax", "marshmallow", "soup"}, true},
      {"measure_temperature", Group::kSeen,
       {"chocolate", "butter", "wax", "soup", "milk", "juice"}, false},
      {"relocate_organism", Group::kSeen, {"frog", "snail", "seedling", "worm", "beetle"}, true},
      {"cool_and_move", Group::kUnseen, {"juice", "milk", "tea", "lemonade"}, true},
      {"wash_and_move", Group::kUnseen, {"beaker", "jar", "flask", "test tube"}, true},
  };
  return kTemplates;
}

const std::vector<std::string>& distractor_pool() {
  static const std::vector<std::string> kPool = {
      "chocolate", "butter", "wax",   "soup",  "milk",   "juice",   "tea",   "frog",
      "snail",     "worm",   "beaker", "jar",  "flask",  "battery", "wire",  "lightbulb",
      "magnet",    "ruler",  "seed",   "apple", "orange", "pencil", "paper", "glue"};
  return kPool;
}

constexpr int kLayoutsPerGroup = 3;

class Science final : public Family {
 public:
  explicit Science(std::uint64_t seed) {
    // Layout = kitchen plus two extra rooms; seen and unseen layouts use
    // disjoint room pairs.
    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(extra_rooms().size());
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    Rng rng(derive_seed(seed, "science/layouts"));
    rng.shuffle(pairs);
    for (int l = 0; l < kLayoutsPerGroup; ++l) {
      layouts_[{Group::kSeen, l}] = pairs[static_cast<std::size_t>(l)];
      layouts_[{Group::kUnseen, l}] = pairs[static_cast<std::size_t>(l + kLayoutsPerGroup)];
    }
  }

  std::vector<Combo> pool(Group group) const override {
    std::vector<Combo> out;
    for (int l = 0; l < kLayoutsPerGroup; ++l) {
      const WorldState base = layout_world(group, l);
      std::vector<std::string> dests;
      for (const auto& r : base.receptacles) {
        if (r.room >= 2) dests.push_back(r.type);
      }
      for (const auto& t : templates()) {
        if (t.group != group) continue;
        for (const auto& obj : t.objects) {
          if (!t.needs_dest) {
            out.push_back({t.name, obj, "thermometer", l});
            continue;
          }
          for (const auto& d : dests) out.push_back({t.name, obj, d, l});
        }
      }
    }
    return out;
  }

  BuiltTask build(const Combo& combo, Group group, std::uint64_t target_seed,
                  std::uint64_t distractor_seed) const override {
    Rng target_rng(target_seed);
    Rng scene_rng(distractor_seed);
    WorldState w = layout_world(group, combo.layout);

    // Objects never start in the hallway or on an appliance.
    std::vector<int> storage;
    for (std::size_t i = 0; i < w.receptacles.size(); ++i) {
      const auto& r = w.receptacles[i];
      if (r.room != 0 && r.capability == Capability::kNone) storage.push_back(static_cast<int>(i));
    }
    auto pick_source = [&](Rng& rng) {
      std::vector<int> c;
      for (int r : storage) {
        if (w.receptacles[r].type != combo.dest) c.push_back(r);
      }
      return c[rng.index(c.size())];
    };

    std::vector<Object> objs;
    auto add = [&](const std::string& type, int where) {
      Object o;
      o.type = type;
      o.name = type + " 1";
      o.receptacle = where;
      objs.push_back(std::move(o));
    };
    add(combo.object, pick_source(target_rng));
    const bool measure = combo.templ == "measure_temperature";
    if (measure) {
      add("thermometer", pick_source(target_rng));
      objs.back().measuring_tool = true;
    }
    std::vector<std::string> pool;
    for (const auto& t : distractor_pool()) {
      if (t != combo.object) pool.push_back(t);
    }
    scene_rng.shuffle(pool);
    const int n_distractors = 3 + static_cast<int>(scene_rng.index(3));
    for (int i = 0; i < n_distractors; ++i) {
      add(pool[i], storage[scene_rng.index(storage.size())]);
    }
    scene_rng.shuffle(objs);
    w.objects = std::move(objs);

    const int target = w.find_object(combo.object + " 1");
    const std::string& tname = w.objects[target].name;
    int dest = -1;
    for (std::size_t i = 0; i < w.receptacles.size(); ++i) {
      if (w.receptacles[i].type == combo.dest) dest = static_cast<int>(i);
    }
    auto sg = [](SubgoalKind k, int obj, ObjectFlag f, bool terminal) {
      Subgoal g;
      g.kind = k;
      g.object = obj;
      g.flag = f;
      g.terminal = terminal;
      return g;
    };
    auto in_room = [](int room) {
      Subgoal g;
      g.kind = SubgoalKind::kInRoom;
      g.room = room;
      return g;
    };

    std::string goal;
    std::string verb;
    ObjectFlag flag = ObjectFlag::kNone;
    const std::string dest_room = dest >= 0 ? w.rooms[w.receptacles[dest].room].name : "";
    if (combo.templ == "heat_and_move" || combo.templ == "cool_and_move" ||
        combo.templ == "wash_and_move") {
      verb = combo.templ == "heat_and_move" ? "heat" : combo.templ == "cool_and_move" ? "cool"
                                                                                      : "clean";
      flag = verb == "heat" ? ObjectFlag::kHeated : verb == "cool" ? ObjectFlag::kCooled
                                                                   : ObjectFlag::kClean;
      const std::string where = verb == "heat" ? "on the stove" : verb == "cool" ? "in the freezer"
                                                                               : "in the sink";
      const std::string said = verb == "clean" ? "wash" : verb;
      goal = said + " the " + combo.object + " " + where + ", then move it to the " + combo.dest +
             " in the " + dest_room + ".";
      Subgoal final = sg(SubgoalKind::kInReceptacle, target, flag, true);
      final.value = combo.dest;
      w.subgoals = {in_room(1), sg(SubgoalKind::kHolding, target, ObjectFlag::kNone, false),
                    sg(SubgoalKind::kFlag, target, flag, false), final};
    } else if (measure) {
      goal = "measure the temperature of the " + combo.object + " with the thermometer.";
      const int thermo = w.find_object("thermometer 1");
      w.subgoals = {sg(SubgoalKind::kHolding, thermo, ObjectFlag::kNone, false),
                    in_room(w.receptacles[w.objects[target].receptacle].room),
                    sg(SubgoalKind::kFlag, target, ObjectFlag::kExamined, true)};
    } else if (combo.templ == "relocate_organism") {
      goal = "find the " + combo.object + " and move it to the " + combo.dest + " in the " +
             dest_room + ".";
      Subgoal final = sg(SubgoalKind::kInReceptacle, target, ObjectFlag::kNone, true);
      final.value = combo.dest;
      w.subgoals = {in_room(w.receptacles[w.objects[target].receptacle].room),
                    sg(SubgoalKind::kHolding, target, ObjectFlag::kNone, false), final};
    } else {
      throw Error("unknown science template " + combo.templ);
    }
    w.achieved.assign(w.subgoals.size(), false);

    BuiltTask out;
    out.observation = "You are in the hallway. " + room_intro(w);
    out.instruction = out.observation + " Your task is to: " + goal;

    PlanRecorder rec(w);
    if (measure) {
      const int thermo = w.find_object("thermometer 1");
      rec.fetch(thermo, "I need the thermometer first. I will look in the " +
                            w.receptacles[w.objects[thermo].receptacle].name + ".");
      const int src = w.objects[target].receptacle;
      rec.go_to(src, "Now I need to find the " + tname + ".");
      rec.open_if_closed(src);
      rec.emit("use thermometer 1 on " + tname,
               "The " + tname + " is here. I will measure it with the thermometer.");
    } else {
      rec.fetch(target, "I need to find the " + combo.object + ". I will check the " +
                            w.receptacles[w.objects[target].receptacle].name + ".");
      if (!verb.empty()) {
        const char* fixture = verb == "heat" ? "stove 1" : verb == "cool" ? "freezer 1" : "sink 1";
        const int app = w.find_receptacle(fixture);
        rec.go_to(app, "Now I need to " + verb + " the " + tname + " with the " + fixture + ".");
        rec.emit(verb + " " + tname + " with " + fixture,
                 "I will " + verb + " the " + tname + " using the " + fixture + ".");
      }
      rec.deliver(target, dest, "Next I should bring the " + tname + " to the " + combo.dest + ".");
    }
    out.plan = std::move(rec.plan);
    out.rationales = std::move(rec.rationales);
    out.world = std::move(w);
    return out;
  }

 private:
  WorldState layout_world(Group g, int l) const {
    const auto [a, b] = layouts_.at({g, l});
    WorldState w;
    w.kind = EnvKind::kScience;
    std::vector<const RoomPlan*> rooms = {&kHallway, &kKitchen, &extra_rooms()[a],
                                          &extra_rooms()[b]};
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      w.rooms.push_back(Room{rooms[i]->name});
      for (const auto& f : rooms[i]->fixtures) {
        Receptacle r;
        r.type = f.name;
        r.name = std::string(f.name) + " 1";
        r.room = static_cast<int>(i);
        r.openable = f.openable;
        r.is_open = !f.openable;
        r.capability = f.capability;
        w.receptacles.push_back(std::move(r));
      }
    }
    return w;
  }

  static std::string room_intro(const WorldState& w) {
    std::vector<std::string> here;
    for (const auto& r : w.receptacles) {
      if (r.room == 0) here.push_back(r.name);
    }
    std::string doors;
    for (std::size_t i = 1; i < w.rooms.size(); ++i) {
      if (i > 1) doors += (i + 1 == w.rooms.size()) ? ", and " : ", ";
      doors += "the " + w.rooms[i].name;
    }
    return "Looking around, you see " + list_with_articles(here) + ". From here you can go to " +
           doors + ".";
  }

  std::map<std::pair<Group, int>, std::pair<int, int>> layouts_;
};

}  // namespace

std::unique_ptr<Family> make_science(std::uint64_t suite_seed) {
  return std::make_unique<Science>(suite_seed);
}

}  // namespace wkm::env::detail
