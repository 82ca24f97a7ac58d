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
#include <set>

#include "family.hpp"
#include "wkm/common/error.hpp"
#include "wkm/common/random.hpp"

namespace wkm::env::detail {

namespace {

struct ReceptacleKind {
  const char* type;
  bool openable;
  Capability capability;
  bool storage;
  bool lamp_host;
  int max_instances;
};

constexpr ReceptacleKind kReceptacleKinds[] = {
    {"bed", false, Capability::kNone, true, false, 1},
    {"desk", false, Capability::kNone, true, true, 1},
    {"drawer", true, Capability::kNone, true, false, 3},
    {"dresser", false, Capability::kNone, true, true, 1},
    {"shelf", false, Capability::kNone, true, false, 3},
    {"cabinet", true, Capability::kNone, true, false, 3},
    {"countertop", false, Capability::kNone, true, false, 2},
    {"garbagecan", false, Capability::kNone, true, false, 1},
    {"toilet", false, Capability::kNone, true, false, 1},
    {"sidetable", false, Capability::kNone, true, true, 2},
    {"diningtable", false, Capability::kNone, true, false, 1},
    {"coffeetable", false, Capability::kNone, true, false, 1},
    {"armchair", false, Capability::kNone, true, false, 1},
    {"safe", true, Capability::kNone, true, false, 1},
};

constexpr ReceptacleKind kAppliances[] = {
    {"sinkbasin", false, Capability::kClean, false, false, 1},
    {"microwave", false, Capability::kHeat, false, false, 1},
    {"fridge", false, Capability::kCool, false, false, 1},
};

struct Template {
  const char* name;
  Group group;
  std::vector<std::string> objects;
  std::vector<std::string> dests;  // empty for the lamp template
};

const std::vector<Template>& templates() {
  static const std::vector<Template> kTemplates = {
      {"pick_and_place", Group::kSeen,
       {"book", "pen", "cellphone", "keychain", "candle", "cd", "pencil", "creditcard", "vase",
        "remotecontrol"},
       {"desk", "shelf", "drawer", "cabinet", "dresser", "sidetable", "countertop", "diningtable"}},
      {"clean_and_place", Group::kSeen,
       {"soapbar", "mug", "apple", "plate", "cloth", "spatula"},
       {"countertop", "diningtable", "cabinet", "shelf", "sidetable", "drawer"}},
      {"heat_and_place", Group::kSeen,
       {"apple", "mug", "potato", "egg", "bread", "plate"},
       {"countertop", "diningtable", "cabinet", "shelf", "sidetable", "coffeetable"}},
      {"examine_in_light", Group::kSeen,
       {"book", "pen", "cellphone", "keychain", "cd", "pencil", "creditcard", "statue"},
       {}},
      {"cool_and_place", Group::kUnseen,
       {"lettuce", "tomato", "winebottle", "apple", "potato", "egg"},
       {"countertop", "diningtable", "cabinet", "shelf", "sidetable", "coffeetable"}},
      {"pick_two_and_place", Group::kUnseen,
       {"cellphone", "book", "keychain", "candle", "pen", "watch"},
       {"desk", "shelf", "drawer", "cabinet", "dresser", "sidetable", "armchair", "safe"}},
  };
  return kTemplates;
}

const std::vector<std::string>& distractor_pool() {
  static const std::vector<std::string> kPool = {
      "book",  "pen",    "cellphone", "keychain", "candle",    "cd",         "pencil",
      "vase",  "soapbar", "mug",      "apple",    "plate",     "cloth",      "potato",
      "egg",   "bread",  "lettuce",   "tomato",   "watch",     "pillow",     "laptop",
      "bowl",  "spraybottle", "soapbottle", "toiletpaper", "alarmclock", "remotecontrol"};
  return kPool;
}

constexpr int kLayoutsPerGroup = 3;

const char* group_name(Group g) { return g == Group::kSeen ? "seen" : "unseen"; }

class Household final : public Family {
 public:
  explicit Household(std::uint64_t seed) : seed_(seed) {
    std::set<std::string> listings;
    for (Group g : {Group::kSeen, Group::kUnseen}) {
      for (int l = 0; l < kLayoutsPerGroup; ++l) {
        std::vector<Receptacle> layout;
        for (int attempt = 0;; ++attempt) {
          layout = make_layout(g, l, attempt);
          if (listings.insert(listing(layout)).second) break;
        }
        layouts_[{g, l}] = std::move(layout);
      }
    }
  }

  std::vector<Combo> pool(Group group) const override {
    std::vector<Combo> out;
    for (int l = 0; l < kLayoutsPerGroup; ++l) {
      const auto& layout = layouts_.at({group, l});
      std::set<std::string> types;
      for (const auto& r : layout) types.insert(r.type);
      for (const auto& t : templates()) {
        if (t.group != group) continue;
        for (const auto& obj : t.objects) {
          if (t.dests.empty()) {
            out.push_back({t.name, obj, "desklamp", l});
            continue;
          }
          for (const auto& d : t.dests) {
            if (types.count(d)) out.push_back({t.name, obj, d, l});
          }
        }
      }
    }
    return out;
  }

  BuiltTask build(const Combo& combo, Group group, std::uint64_t target_seed,
                  std::uint64_t distractor_seed) const override {
    Rng target_rng(target_seed);
    Rng scene_rng(distractor_seed);

    WorldState w;
    w.kind = EnvKind::kHousehold;
    w.rooms = {Room{"room"}};
    w.receptacles = layouts_.at({group, combo.layout});

    std::vector<int> storage;
    std::vector<int> lamp_hosts;
    for (std::size_t i = 0; i < w.receptacles.size(); ++i) {
      const auto& r = w.receptacles[i];
      if (r.capability == Capability::kNone) storage.push_back(static_cast<int>(i));
      if (r.type == "desk" || r.type == "sidetable" || r.type == "dresser") {
        lamp_hosts.push_back(static_cast<int>(i));
      }
    }
    auto pick_source = [&](Rng& rng) {
      std::vector<int> candidates;
      for (int r : storage) {
        if (w.receptacles[r].type != combo.dest) candidates.push_back(r);
      }
      return candidates[rng.index(candidates.size())];
    };

    const bool two = combo.templ == "pick_two_and_place";
    const bool lamp = combo.templ == "examine_in_light";
    std::vector<Object> objs;
    auto add = [&](const std::string& type, int n, int where) {
      Object o;
      o.type = type;
      o.name = type + " " + std::to_string(n);
      o.receptacle = where;
      objs.push_back(std::move(o));
    };
    add(combo.object, 1, pick_source(target_rng));
    if (two) add(combo.object, 2, pick_source(target_rng));
    if (lamp) {
      add("desklamp", 1, lamp_hosts[target_rng.index(lamp_hosts.size())]);
      objs.back().takeable = false;
      objs.back().light_source = true;
    }
    const int n_distractors = 3 + static_cast<int>(scene_rng.index(3));
    std::vector<std::string> pool;
    for (const auto& t : distractor_pool()) {
      if (t != combo.object) pool.push_back(t);
    }
    scene_rng.shuffle(pool);
    for (int i = 0; i < n_distractors; ++i) {
      add(pool[i], 1, storage[scene_rng.index(storage.size())]);
    }
    scene_rng.shuffle(objs);
    w.objects = std::move(objs);

    const int target = w.find_object(combo.object + " 1");
    auto in_dest = [&](int obj, ObjectFlag flag) {
      Subgoal g;
      g.kind = SubgoalKind::kInReceptacle;
      g.object = obj;
      g.value = combo.dest;
      g.flag = flag;
      g.terminal = true;
      return g;
    };
    auto holding = [&](int obj) {
      Subgoal g;
      g.kind = SubgoalKind::kHolding;
      g.object = obj;
      return g;
    };
    auto flagged = [&](int obj, ObjectFlag f, bool terminal) {
      Subgoal g;
      g.kind = SubgoalKind::kFlag;
      g.object = obj;
      g.flag = f;
      g.terminal = terminal;
      return g;
    };

    std::string goal;
    ObjectFlag flag = ObjectFlag::kNone;
    int appliance = -1;
    std::string verb;
    if (combo.templ == "pick_and_place") {
      goal = "put some " + combo.object + " in " + combo.dest + ".";
      w.subgoals = {holding(target), in_dest(target, ObjectFlag::kNone)};
    } else if (combo.templ == "clean_and_place" || combo.templ == "heat_and_place" ||
               combo.templ == "cool_and_place") {
      verb = combo.templ.substr(0, combo.templ.find('_'));
      flag = verb == "clean" ? ObjectFlag::kClean
             : verb == "heat" ? ObjectFlag::kHeated
                              : ObjectFlag::kCooled;
      appliance = w.find_receptacle(verb == "clean"  ? "sinkbasin 1"
                                    : verb == "heat" ? "microwave 1"
                                                     : "fridge 1");
      goal = verb + " some " + combo.object + " and put it in " + combo.dest + ".";
      w.subgoals = {holding(target), flagged(target, flag, false), in_dest(target, flag)};
    } else if (lamp) {
      goal = "examine the " + combo.object + " with the desklamp.";
      w.subgoals = {holding(target), flagged(target, ObjectFlag::kExamined, true)};
    } else if (two) {
      goal = "put two " + combo.object + " in " + combo.dest + ".";
      w.subgoals = {in_dest(target, ObjectFlag::kNone),
                    in_dest(w.find_object(combo.object + " 2"), ObjectFlag::kNone)};
    } else {
      throw Error("unknown household template " + combo.templ);
    }
    w.achieved.assign(w.subgoals.size(), false);

    std::vector<std::string> names;
    for (const auto& r : w.receptacles) names.push_back(r.name);
    BuiltTask out;
    out.observation = "You are in the middle of a room. Looking quickly around you, you see " +
                      list_with_articles(names) + ".";
    out.instruction = out.observation + " Your task is to: " + goal;

    // The first destination instance of the requested type.
    int dest = -1;
    for (std::size_t i = 0; i < w.receptacles.size() && dest < 0; ++i) {
      if (w.receptacles[i].type == combo.dest) dest = static_cast<int>(i);
    }

    PlanRecorder rec(w);
    const std::string& tname = w.objects[target].name;
    rec.fetch(target, "I need to find the " + combo.object + ". I will check the " +
                          w.receptacles[w.objects[target].receptacle].name + ".");
    if (appliance >= 0) {
      rec.go_to(appliance, "Now I need to " + verb + " the " + tname + " with the " +
                               w.receptacles[appliance].name + ".");
      rec.emit(verb + " " + tname + " with " + w.receptacles[appliance].name,
               "I will " + verb + " the " + tname + " using the " +
                   w.receptacles[appliance].name + ".");
    }
    if (lamp) {
      const int l = w.find_object("desklamp 1");
      const int host = w.objects[l].receptacle;
      rec.go_to(host, "Now I need to find the desklamp to examine the " + tname + ".");
      rec.emit("use desklamp 1", "I found the desklamp. I should use it to examine the " + tname +
                                     ".");
    } else {
      rec.deliver(target, dest, "Next I should bring the " + tname + " to the " + combo.dest + ".");
    }
    if (two) {
      const int second = w.find_object(combo.object + " 2");
      rec.fetch(second, "I still need a second " + combo.object + ". I will check the " +
                            w.receptacles[w.objects[second].receptacle].name + ".");
      rec.deliver(second, dest, "Next I should bring the " + w.objects[second].name + " to the " +
                                    combo.dest + ".");
    }
    out.plan = std::move(rec.plan);
    out.rationales = std::move(rec.rationales);
    out.world = std::move(w);
    return out;
  }

 private:
  std::vector<Receptacle> make_layout(Group g, int l, int attempt) const {
    Rng rng(derive_seed(seed_, std::string("household/layout/") + group_name(g) + "/" +
                                   std::to_string(l) + "/" + std::to_string(attempt)));
    std::vector<const ReceptacleKind*> kinds;
    for (const auto& k : kReceptacleKinds) kinds.push_back(&k);
    rng.shuffle(kinds);
    // Eight storage kinds per layout, at least one lamp host.
    std::vector<const ReceptacleKind*> chosen(kinds.begin(), kinds.begin() + 8);
    if (std::none_of(chosen.begin(), chosen.end(), [](auto* k) { return k->lamp_host; })) {
      for (auto* k : kinds) {
        if (k->lamp_host) {
          chosen.back() = k;
          break;
        }
      }
    }
    for (const auto& a : kAppliances) chosen.push_back(&a);
    rng.shuffle(chosen);
    std::vector<Receptacle> out;
    for (const auto* k : chosen) {
      const int n = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(k->max_instances)));
      for (int i = n; i >= 1; --i) {
        Receptacle r;
        r.type = k->type;
        r.name = std::string(k->type) + " " + std::to_string(i);
        r.openable = k->openable;
        r.is_open = !k->openable;
        r.capability = k->capability;
        out.push_back(std::move(r));
      }
    }
    return out;
  }

  static std::string listing(const std::vector<Receptacle>& rs) {
    std::string s;
    for (const auto& r : rs) s += r.name + ",";
    return s;
  }

  std::uint64_t seed_;
  std::map<std::pair<Group, int>, std::vector<Receptacle>> layouts_;
};

}  // namespace

std::unique_ptr<Family> make_household(std::uint64_t suite_seed) {
  return std::make_unique<Household>(suite_seed);
}

}  // namespace wkm::env::detail
