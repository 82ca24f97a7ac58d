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

#include "wkm/env/world.hpp"

#include <algorithm>
#include <set>

#include "wkm/common/error.hpp"

namespace wkm::env {

std::string_view to_string(RewardMode m) {
  return m == RewardMode::kBinary ? "binary" : "dense";
}

RewardMode parse_reward_mode(std::string_view s) {
  if (s == "binary") return RewardMode::kBinary;
  if (s == "dense") return RewardMode::kDense;
  throw ConfigError("unknown reward_mode: " + std::string(s));
}

int default_max_steps(EnvKind kind) {
  switch (kind) {
    case EnvKind::kHousehold: return 40;
    case EnvKind::kShopping: return 10;
    case EnvKind::kScience: return 30;
  }
  return 40;
}

RewardMode default_reward_mode(EnvKind kind) {
  return kind == EnvKind::kHousehold ? RewardMode::kBinary : RewardMode::kDense;
}

EnvConfig EnvConfig::defaults(EnvKind kind, std::uint64_t seed) {
  return EnvConfig{kind, seed, default_max_steps(kind), default_reward_mode(kind)};
}

void EnvConfig::validate() const {
  if (max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (kind == EnvKind::kScience && (max_steps < 10 || max_steps > 120)) {
    throw ConfigError("science max_steps must lie in [10, 120]");
  }
}

int WorldState::find_receptacle(std::string_view name) const {
  for (std::size_t i = 0; i < receptacles.size(); ++i) {
    if (receptacles[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int WorldState::find_object(std::string_view name) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int WorldState::find_room(std::string_view name) const {
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (rooms[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int WorldState::find_product(std::string_view id) const {
  for (std::size_t i = 0; i < shop.products.size(); ++i) {
    if (shop.products[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

bool has_flag(const Object& o, ObjectFlag f) {
  switch (f) {
    case ObjectFlag::kNone: return true;
    case ObjectFlag::kClean: return o.clean;
    case ObjectFlag::kHeated: return o.heated;
    case ObjectFlag::kCooled: return o.cooled;
    case ObjectFlag::kExamined: return o.examined;
  }
  return false;
}

}  // namespace

bool WorldState::holds(const Subgoal& g) const {
  switch (g.kind) {
    case SubgoalKind::kHolding:
      return inventory == g.object;
    case SubgoalKind::kFlag:
      return has_flag(objects[g.object], g.flag);
    case SubgoalKind::kInReceptacle: {
      const Object& o = objects[g.object];
      return o.receptacle >= 0 && receptacles[o.receptacle].type == g.value && has_flag(o, g.flag);
    }
    case SubgoalKind::kInRoom:
      return agent_room == g.room;
    case SubgoalKind::kSearched:
      return shop.query == g.value && shop.page != ShopPage::kHome;
    case SubgoalKind::kViewing:
      return shop.product == g.product &&
             (shop.page == ShopPage::kProduct || shop.page == ShopPage::kConfirmation);
    case SubgoalKind::kColorChosen:
      return shop.product == g.product && shop.selected_color == g.value;
    case SubgoalKind::kSizeChosen:
      return shop.product == g.product && shop.selected_size == g.value;
    case SubgoalKind::kPurchased:
      return shop.purchased && shop.product == g.product && shop.selected_color == g.color &&
             shop.selected_size == g.size;
  }
  return false;
}

bool WorldState::goal_satisfied() const {
  bool any = false;
  for (const auto& g : subgoals) {
    if (!g.terminal) continue;
    any = true;
    if (!holds(g)) return false;
  }
  return any;
}

std::string list_with_articles(const std::vector<std::string>& names) {
  if (names.empty()) return "nothing";
  auto article = [](const std::string& n) {
    const char c = n.empty() ? 'x' : n.front();
    return (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') ? std::string("an ")
                                                                       : std::string("a ");
  };
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? ", and " : ", ";
    out += article(names[i]) + names[i];
  }
  return out;
}

namespace {

bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

// Splits "a SEP b" at the first SEP. Both halves must be non-empty.
bool split_once(std::string_view s, std::string_view sep, std::string_view& a,
                std::string_view& b) {
  const auto pos = s.find(sep);
  if (pos == std::string_view::npos || pos == 0 || pos + sep.size() >= s.size()) return false;
  a = s.substr(0, pos);
  b = s.substr(pos + sep.size());
  return true;
}

std::string contents_of(const WorldState& w, int r) {
  std::vector<std::string> names;
  for (const auto& o : w.objects) {
    if (o.receptacle == r) names.push_back(o.name);
  }
  return list_with_articles(names);
}

std::string arrival_text(const WorldState& w, int r) {
  const Receptacle& rec = w.receptacles[r];
  if (rec.openable && !rec.is_open) return "The " + rec.name + " is closed.";
  if (rec.openable) return "The " + rec.name + " is open. In it, you see " + contents_of(w, r) + ".";
  return "On the " + rec.name + ", you see " + contents_of(w, r) + ".";
}

std::string room_text(const WorldState& w, int room) {
  std::vector<std::string> here;
  for (const auto& r : w.receptacles) {
    if (r.room == room) here.push_back(r.name);
  }
  std::string out = "In the " + w.rooms[room].name + ", you see " + list_with_articles(here) + ".";
  if (room == 0) {
    std::vector<std::string> doors;
    for (std::size_t i = 1; i < w.rooms.size(); ++i) doors.push_back("the " + w.rooms[i].name);
    std::string joined;
    for (std::size_t i = 0; i < doors.size(); ++i) {
      if (i > 0) joined += (i + 1 == doors.size()) ? ", and " : ", ";
      joined += doors[i];
    }
    out += " From here you can go to " + joined + ".";
  }
  return out;
}

bool accessible(const Receptacle& r) { return !r.openable || r.is_open; }

std::string product_title(const Product& p) { return p.color + " " + p.category; }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::string home_text(const WorldState& w) {
  return "You are on the home page. Departments: " + join(w.shop.categories, ", ") + ".";
}

// Returns the observation for a valid action, or an empty string for an
// invalid one. All mutation happens on `w`, which the
// caller discards when the action turns out invalid.
std::string apply_physical(WorldState& w, std::string_view a) {
  std::string_view x, y;
  if (strip_prefix(a, "go to ")) {
    if (w.kind == EnvKind::kScience) {
      const int room = w.find_room(a);
      if (room >= 0) {
        if (room == w.agent_room) return {};
        if (w.agent_room != 0 && room != 0) return {};
        w.agent_room = room;
        w.agent_at = -1;
        return "You move to the " + w.rooms[room].name + ". " + room_text(w, room);
      }
    }
    const int r = w.find_receptacle(a);
    if (r < 0 || w.receptacles[r].room != w.agent_room) return {};
    w.agent_at = r;
    return arrival_text(w, r);
  }
  if (strip_prefix(a, "open ")) {
    const int r = w.find_receptacle(a);
    if (r < 0 || w.agent_at != r) return {};
    Receptacle& rec = w.receptacles[r];
    if (!rec.openable || rec.is_open) return {};
    rec.is_open = true;
    return "You open the " + rec.name + ". The " + rec.name + " is open. In it, you see " +
           contents_of(w, r) + ".";
  }
  if (strip_prefix(a, "close ")) {
    const int r = w.find_receptacle(a);
    if (r < 0 || w.agent_at != r) return {};
    Receptacle& rec = w.receptacles[r];
    if (!rec.openable || !rec.is_open) return {};
    rec.is_open = false;
    return "You close the " + rec.name + ".";
  }
  if (strip_prefix(a, "take ") && split_once(a, " from ", x, y)) {
    const int o = w.find_object(x);
    const int r = w.find_receptacle(y);
    if (o < 0 || r < 0 || w.agent_at != r || !accessible(w.receptacles[r])) return {};
    if (w.objects[o].receptacle != r || !w.objects[o].takeable || w.inventory != -1) return {};
    w.objects[o].receptacle = -1;
    w.inventory = o;
    return "You pick up the " + w.objects[o].name + " from the " + w.receptacles[r].name + ".";
  }
  if (strip_prefix(a, "put ") && split_once(a, " in/on ", x, y)) {
    const int o = w.find_object(x);
    const int r = w.find_receptacle(y);
    if (o < 0 || r < 0 || w.agent_at != r || !accessible(w.receptacles[r])) return {};
    if (w.inventory != o) return {};
    w.objects[o].receptacle = r;
    w.inventory = -1;
    return "You put the " + w.objects[o].name + " in/on the " + w.receptacles[r].name + ".";
  }
  for (auto [verb, cap] : {std::pair{std::string_view("clean "), Capability::kClean},
                           std::pair{std::string_view("heat "), Capability::kHeat},
                           std::pair{std::string_view("cool "), Capability::kCool}}) {
    std::string_view rest = a;
    if (!strip_prefix(rest, verb) || !split_once(rest, " with ", x, y)) continue;
    const int o = w.find_object(x);
    const int r = w.find_receptacle(y);
    if (o < 0 || r < 0 || w.agent_at != r || w.receptacles[r].capability != cap) return {};
    if (w.inventory != o) return {};
    Object& obj = w.objects[o];
    if (cap == Capability::kClean) obj.clean = true;
    if (cap == Capability::kHeat) {
      obj.heated = true;
      obj.cooled = false;
    }
    if (cap == Capability::kCool) {
      obj.cooled = true;
      obj.heated = false;
    }
    return "You " + std::string(verb) + "the " + obj.name + " using the " + w.receptacles[r].name +
           ".";
  }
  if (strip_prefix(a, "use ")) {
    if (split_once(a, " on ", x, y)) {
      const int tool = w.find_object(x);
      const int o = w.find_object(y);
      if (tool < 0 || o < 0 || !w.objects[tool].measuring_tool || w.inventory != tool) return {};
      if (w.agent_at < 0 || w.objects[o].receptacle != w.agent_at) return {};
      Object& obj = w.objects[o];
      obj.examined = true;
      const int reading = obj.heated ? 95 : obj.cooled ? -4 : 21;
      return "The " + w.objects[tool].name + " reads " + std::to_string(reading) +
             " degrees celsius for the " + obj.name + ".";
    }
    const int lamp = w.find_object(a);
    if (lamp < 0 || !w.objects[lamp].light_source) return {};
    if (w.agent_at < 0 || w.objects[lamp].receptacle != w.agent_at) return {};
    if (w.inventory >= 0) w.objects[w.inventory].examined = true;
    return "You turn on the " + w.objects[lamp].name + ".";
  }
  if (strip_prefix(a, "examine ")) {
    const int o = w.find_object(a);
    if (o < 0) return {};
    const Object& obj = w.objects[o];
    if (w.inventory != o && (w.agent_at < 0 || obj.receptacle != w.agent_at)) return {};
    std::vector<std::string> traits;
    if (obj.clean) traits.emplace_back("clean");
    if (obj.heated) traits.emplace_back("hot");
    if (obj.cooled) traits.emplace_back("cold");
    if (traits.empty()) return "There's nothing special about the " + obj.name + ".";
    return "The " + obj.name + " is " + join(traits, " and ") + ".";
  }
  return {};
}

std::string apply_shop(WorldState& w, std::string_view a) {
  Shop& s = w.shop;
  auto clear_selection = [&] {
    s.product = -1;
    s.selected_color.clear();
    s.selected_size.clear();
  };
  if (a.size() > 8 && a.substr(0, 7) == "search[" && a.back() == ']') {
    const std::string q(a.substr(7, a.size() - 8));
    if (s.page != ShopPage::kHome && s.page != ShopPage::kResults) return {};
    if (std::find(s.categories.begin(), s.categories.end(), q) == s.categories.end()) return {};
    s.page = ShopPage::kResults;
    s.query = q;
    clear_selection();
    std::vector<std::string> rows;
    for (const auto& p : s.products) {
      if (p.category == q) {
        rows.push_back("[" + p.id + "] " + product_title(p) + " ($" + std::to_string(p.price) + ")");
      }
    }
    return "Results for \"" + q + "\": " + join(rows, "; ") + ".";
  }
  if (a.size() > 7 && a.substr(0, 6) == "click[" && a.back() == ']') {
    const std::string target(a.substr(6, a.size() - 7));
    if (target == "back to search") {
      if (s.page != ShopPage::kResults && s.page != ShopPage::kProduct) return {};
      s.page = ShopPage::kHome;
      s.query.clear();
      clear_selection();
      return home_text(w);
    }
    const int p = w.find_product(target);
    if (p >= 0) {
      if (s.page != ShopPage::kResults || s.products[p].category != s.query) return {};
      s.page = ShopPage::kProduct;
      clear_selection();
      s.product = p;
      const Product& prod = s.products[p];
      return "[" + prod.id + "] " + product_title(prod) + ". Price: $" +
             std::to_string(prod.price) + ". Color options: " + join(prod.colors, ", ") +
             ". Size options: " + join(prod.sizes, ", ") + ".";
    }
    if (s.page != ShopPage::kProduct) return {};
    const Product& prod = s.products[s.product];
    if (std::find(prod.colors.begin(), prod.colors.end(), target) != prod.colors.end()) {
      s.selected_color = target;
      return "You select " + target + ".";
    }
    if (std::find(prod.sizes.begin(), prod.sizes.end(), target) != prod.sizes.end()) {
      s.selected_size = target;
      return "You select " + target + ".";
    }
    return {};
  }
  if (a == "buy now") {
    if (s.page != ShopPage::kProduct) return {};
    s.purchased = true;
    s.page = ShopPage::kConfirmation;
    return "Thank you for your purchase.";
  }
  return {};
}

double current_reward(const WorldState& w) {
  if (w.goal_satisfied()) return 1.0;
  if (w.reward_mode == RewardMode::kBinary || w.subgoals.empty()) return 0.0;
  const auto n = std::count(w.achieved.begin(), w.achieved.end(), true);
  return static_cast<double>(n) / static_cast<double>(w.subgoals.size());
}

}  // namespace

StepOutcome step(WorldState& state, const ActionRecord& action) {
  if (state.done) throw PreconditionError("step: episode already finished");
  StepOutcome out;
  std::string observation;
  WorldState next = state;
  if (!action.parse_failed()) {
    observation = state.kind == EnvKind::kShopping ? apply_shop(next, action.action_id())
                                                   : apply_physical(next, action.action_id());
  }
  out.was_valid = !observation.empty();
  if (out.was_valid) {
    state = std::move(next);
    for (std::size_t i = 0; i < state.subgoals.size(); ++i) {
      if (!state.achieved[i] && state.holds(state.subgoals[i])) state.achieved[i] = true;
    }
    if (state.goal_satisfied()) std::fill(state.achieved.begin(), state.achieved.end(), true);
    out.observation = std::move(observation);
  } else {
    out.observation = std::string(kNothingHappens);
  }
  ++state.steps_taken;
  state.reward = current_reward(state);
  state.done = state.goal_satisfied() || state.shop.purchased || state.steps_taken >= state.max_steps;
  out.done = state.done;
  out.reward_so_far = state.reward;
  return out;
}

std::vector<std::string> action_templates(EnvKind kind) {
  switch (kind) {
    case EnvKind::kHousehold:
      return {"go to {receptacle}", "open {receptacle}", "close {receptacle}",
              "take {object} from {receptacle}", "put {object} in/on {receptacle}",
              "clean {object} with {receptacle}", "heat {object} with {receptacle}",
              "cool {object} with {receptacle}", "use {lamp}", "examine {object}"};
    case EnvKind::kScience:
      return {"go to {room}", "go to {receptacle}", "open {receptacle}", "close {receptacle}",
              "take {object} from {receptacle}", "put {object} in/on {receptacle}",
              "clean {object} with {receptacle}", "heat {object} with {receptacle}",
              "cool {object} with {receptacle}", "use {tool} on {object}", "examine {object}"};
    case EnvKind::kShopping:
      return {"search[{department}]", "click[{product}]", "click[{option}]",
              "click[back to search]", "buy now"};
  }
  return {};
}

std::vector<std::string> enumerate_actions(const WorldState& w) {
  std::vector<std::string> out;
  if (w.kind == EnvKind::kShopping) {
    for (const auto& c : w.shop.categories) out.push_back("search[" + c + "]");
    for (const auto& p : w.shop.products) out.push_back("click[" + p.id + "]");
    std::vector<std::string> options;
    auto add_option = [&](const std::string& o) {
      if (std::find(options.begin(), options.end(), o) == options.end()) options.push_back(o);
    };
    for (const auto& p : w.shop.products) {
      for (const auto& c : p.colors) add_option(c);
    }
    for (const auto& p : w.shop.products) {
      for (const auto& s : p.sizes) add_option(s);
    }
    for (const auto& o : options) out.push_back("click[" + o + "]");
    out.emplace_back("click[back to search]");
    out.emplace_back("buy now");
    return out;
  }
  if (w.kind == EnvKind::kScience) {
    for (const auto& room : w.rooms) out.push_back("go to " + room.name);
  }
  for (const auto& r : w.receptacles) out.push_back("go to " + r.name);
  for (const auto& r : w.receptacles) {
    if (r.openable) {
      out.push_back("open " + r.name);
      out.push_back("close " + r.name);
    }
  }
  for (const auto& o : w.objects) {
    if (!o.takeable) continue;
    for (const auto& r : w.receptacles) out.push_back("take " + o.name + " from " + r.name);
  }
  for (const auto& o : w.objects) {
    if (!o.takeable) continue;
    for (const auto& r : w.receptacles) out.push_back("put " + o.name + " in/on " + r.name);
  }
  for (auto [verb, cap] : {std::pair{"clean ", Capability::kClean},
                           std::pair{"heat ", Capability::kHeat},
                           std::pair{"cool ", Capability::kCool}}) {
    for (const auto& r : w.receptacles) {
      if (r.capability != cap) continue;
      for (const auto& o : w.objects) {
        if (o.takeable && !o.measuring_tool) out.push_back(verb + o.name + " with " + r.name);
      }
    }
  }
  for (const auto& t : w.objects) {
    if (t.light_source) out.push_back("use " + t.name);
    if (t.measuring_tool) {
      for (const auto& o : w.objects) {
        if (&o != &t) out.push_back("use " + t.name + " on " + o.name);
      }
    }
  }
  for (const auto& o : w.objects) out.push_back("examine " + o.name);
  return out;
}

namespace {

Json object_json(const Object& o) {
  return Json{{"name", o.name},       {"type", o.type},       {"receptacle", o.receptacle},
              {"takeable", o.takeable}, {"light", o.light_source}, {"tool", o.measuring_tool},
              {"clean", o.clean},     {"heated", o.heated},   {"cooled", o.cooled},
              {"examined", o.examined}};
}

}  // namespace

Json world_json(const WorldState& w) {
  Json rooms = Json::array();
  for (const auto& r : w.rooms) rooms.push_back(r.name);
  Json recs = Json::array();
  for (const auto& r : w.receptacles) {
    recs.push_back(Json{{"name", r.name},
                        {"type", r.type},
                        {"room", r.room},
                        {"openable", r.openable},
                        {"open", r.is_open},
                        {"capability", static_cast<int>(r.capability)}});
  }
  Json objs = Json::array();
  for (const auto& o : w.objects) objs.push_back(object_json(o));
  Json products = Json::array();
  for (const auto& p : w.shop.products) {
    products.push_back(Json{{"id", p.id},
                            {"category", p.category},
                            {"color", p.color},
                            {"colors", p.colors},
                            {"sizes", p.sizes},
                            {"price", p.price}});
  }
  Json achieved = Json::array();
  for (bool b : w.achieved) achieved.push_back(b);
  return Json{{"kind", to_string(w.kind)},
              {"rooms", std::move(rooms)},
              {"receptacles", std::move(recs)},
              {"objects", std::move(objs)},
              {"agent_room", w.agent_room},
              {"agent_at", w.agent_at},
              {"inventory", w.inventory},
              {"shop",
               Json{{"categories", w.shop.categories},
                    {"products", std::move(products)},
                    {"page", static_cast<int>(w.shop.page)},
                    {"query", w.shop.query},
                    {"product", w.shop.product},
                    {"color", w.shop.selected_color},
                    {"size", w.shop.selected_size},
                    {"purchased", w.shop.purchased}}},
              {"achieved", std::move(achieved)}};
}

Json state_json(const WorldState& w) {
  Json j = world_json(w);
  j["steps_taken"] = w.steps_taken;
  j["done"] = w.done;
  j["reward"] = w.reward;
  return j;
}

}  // namespace wkm::env
