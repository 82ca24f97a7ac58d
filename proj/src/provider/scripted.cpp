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

#include "wkm/provider/scripted.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "wkm/common/error.hpp"
#include "wkm/common/hash.hpp"
#include "wkm/common/random.hpp"
#include "wkm/core/action.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm {

namespace {

constexpr std::string_view kInstructionLabel = "Task Instruction: ";
constexpr std::string_view kActionLabel = "Action: ";
constexpr std::string_view kObservationLabel = "Observation: ";
constexpr std::string_view kNothing = "Nothing happens.";

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool ends_with_cue(std::string_view s, std::string_view cue) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n')) s.remove_suffix(1);
  return s.size() >= cue.size() && s.substr(s.size() - cue.size()) == cue;
}

std::string goal_of(const std::string& instruction) {
  constexpr std::string_view kCue = "Your task is to: ";
  const auto at = instruction.rfind(kCue);
  std::string goal = at == std::string::npos ? instruction : instruction.substr(at + kCue.size());
  while (!goal.empty() && (goal.back() == '.' || goal.back() == ' ')) goal.pop_back();
  return goal;
}

std::string join_names(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? (i == 1 ? " and " : ", and ") : ", ";
    out += "the " + items[i];
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& action) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < action.size()) {
    const auto sp = action.find(' ', pos);
    const auto end = sp == std::string::npos ? action.size() : sp;
    if (end > pos) out.push_back(action.substr(pos, end - pos));
    pos = end + 1;
  }
  out.emplace_back(kEndOfAction);
  return out;
}

std::uint64_t call_seed(std::uint64_t seed, std::string_view prompt, double temperature) {
  std::uint64_t bits = 0;
  static_assert(sizeof bits == sizeof temperature);
  std::memcpy(&bits, &temperature, sizeof bits);
  return derive_seed(derive_seed(seed, prompt), bits);
}

std::string completion_for(const std::string& rationale, const std::string& action) {
  return "Thought: " + rationale + "\nAction: " + action;
}

}  // namespace

ParsedHistory parse_rendered_history(std::string_view text) {
  ParsedHistory h;
  const auto at = text.rfind(kInstructionLabel);
  if (at == std::string_view::npos) return h;
  // Only line starts count.
  if (at != 0 && text[at - 1] != '\n') return h;
  text.remove_prefix(at);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    if (starts_with(line, kInstructionLabel)) {
      h.instruction = std::string(line.substr(kInstructionLabel.size()));
    } else if (starts_with(line, kActionLabel)) {
      h.actions.emplace_back(line.substr(kActionLabel.size()));
      h.observations.emplace_back();
    } else if (starts_with(line, kObservationLabel) && !h.observations.empty()) {
      h.observations.back() = std::string(line.substr(kObservationLabel.size()));
    }
    pos = nl + 1;
  }
  return h;
}

std::string scripted_state_summary(const ParsedHistory& h) {
  std::vector<std::string> visited;
  std::vector<std::string> opened;
  std::vector<std::string> done;
  std::string at;
  std::string holding;
  std::string shop_query;
  std::string viewing;
  std::vector<std::string> selected;
  bool bought = false;

  auto add_unique = [](std::vector<std::string>& v, const std::string& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (std::size_t i = 0; i < h.actions.size(); ++i) {
    if (h.observations[i] == kNothing) continue;
    const std::string a = canonical_action_id(h.actions[i].empty() ? "?" : h.actions[i]);
    std::string_view v = a;
    if (starts_with(v, "go to ")) {
      at = a.substr(6);
      add_unique(visited, at);
    } else if (starts_with(v, "open ")) {
      add_unique(opened, a.substr(5));
    } else if (starts_with(v, "close ")) {
      std::erase(opened, a.substr(6));
    } else if (starts_with(v, "take ")) {
      holding = a.substr(5, a.find(" from ") - 5);
    } else if (starts_with(v, "put ")) {
      const auto sep = a.find(" in/on ");
      done.push_back("put the " + a.substr(4, sep - 4) + " in/on the " + a.substr(sep + 7));
      holding.clear();
    } else if (starts_with(v, "clean ") || starts_with(v, "heat ") || starts_with(v, "cool ")) {
      const auto sp = a.find(' ');
      const std::string verb = a.substr(0, sp);
      const std::string obj = a.substr(sp + 1, a.find(" with ") - sp - 1);
      done.push_back((verb == "clean" ? "cleaned" : verb == "heat" ? "heated" : "cooled") +
                     std::string(" the ") + obj);
    } else if (starts_with(v, "use ")) {
      const auto on = a.find(" on ");
      if (on != std::string::npos) {
        done.push_back("measured the " + a.substr(on + 4));
      } else {
        done.push_back("used the " + a.substr(4));
      }
    } else if (starts_with(v, "search[")) {
      shop_query = a.substr(7, a.size() - 8);
      viewing.clear();
      selected.clear();
    } else if (starts_with(v, "click[")) {
      const std::string target = a.substr(6, a.size() - 7);
      if (target == "back to search") {
        shop_query.clear();
        viewing.clear();
        selected.clear();
      } else if (viewing.empty()) {
        viewing = target;
      } else {
        add_unique(selected, target);
      }
    } else if (v == "buy now") {
      bought = true;
    }
  }

  std::string out = "Your task is to " + goal_of(h.instruction) + ".";
  if (!shop_query.empty()) out += " You searched for " + shop_query + ".";
  if (!viewing.empty()) out += " You are looking at item " + viewing + ".";
  if (!selected.empty()) {
    std::string s;
    for (std::size_t i = 0; i < selected.size(); ++i) s += (i ? ", " : "") + selected[i];
    out += " You have selected " + s + ".";
  }
  if (bought) out += " You have bought the item.";
  if (!visited.empty()) out += " So far you have checked " + join_names(visited) + ".";
  if (!at.empty()) out += " You are now at the " + at + ".";
  if (!opened.empty()) out += " You have opened " + join_names(opened) + ".";
  for (const auto& d : done) out += " You have " + d + ".";
  if (shop_query.empty() && viewing.empty()) {
    out += holding.empty() ? " You are not carrying anything." : " You are carrying the " +
                                                                     holding + ".";
  }
  if (h.actions.empty()) out += " You have not acted yet.";
  return out;
}

Embedding feature_hash_embedding(std::string_view text, std::size_t dimension) {
  Embedding v(dimension, 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a64(token);
    v[h % dimension] += ((h >> 32) & 1U) ? -1.0 : 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return v;
}

ScriptedConfig ScriptedConfig::from_json(const Json& j) {
  ScriptedConfig c;
  try {
    if (j.contains("role")) c.role = parse_role(j.at("role").get<std::string>());
    c.seed = j.value("seed", std::uint64_t{0});
    c.plan_mass = j.value("plan_mass", 1.0);
    if (j.contains("plans")) {
      for (const auto& p : j.at("plans")) {
        ScriptedPlan plan;
        plan.actions = p.at("actions").get<std::vector<std::string>>();
        if (p.contains("rationales")) {
          plan.rationales = p.at("rationales").get<std::vector<std::string>>();
        }
        c.plans[p.at("instruction").get<std::string>()] = std::move(plan);
      }
    }
    if (j.contains("action_table")) {
      for (const auto& [k, v] : j.at("action_table").items()) {
        c.action_table[canonical_action_id(k)] = v.get<double>();
      }
    }
    if (j.contains("token_table")) {
      for (const auto& [k, v] : j.at("token_table").items()) c.token_table[k] = v.get<double>();
    }
    if (j.contains("completions")) {
      for (const auto& r : j.at("completions")) {
        c.completions.push_back({r.at("contains").get<std::string>(),
                                 r.at("text").get<std::string>()});
      }
    }
    if (j.contains("sabotage")) c.sabotage = j.at("sabotage").get<std::vector<std::string>>();
    c.sabotage_fraction = j.value("sabotage_fraction", 0.0);
    c.sabotage_action = j.value("sabotage_action", c.sabotage_action);
    c.dimension = j.value("dimension", std::size_t{64});
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("scripted provider config: ") + e.what());
  }
  if (c.dimension == 0) throw ConfigError("scripted provider dimension must be positive");
  if (c.plan_mass < 0.0 || c.plan_mass > 1.0) {
    throw ConfigError("scripted provider plan_mass must lie in [0, 1]");
  }
  return c;
}

ScriptedProvider::ScriptedProvider(ScriptedConfig config) : config_(std::move(config)) {
  for (const auto& [k, v] : config_.action_table) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("action_table score for " + k);
  }
}

bool ScriptedProvider::sabotaged(const std::string& instruction) const {
  if (instruction.empty()) return false;
  for (const auto& s : config_.sabotage) {
    if (!s.empty() && instruction.find(s) != std::string::npos) return true;
  }
  if (config_.sabotage_fraction > 0.0) {
    const std::uint64_t h = derive_seed(config_.seed, "sabotage/" + instruction);
    return static_cast<double>(h >> 11) * 0x1.0p-53 < config_.sabotage_fraction;
  }
  return false;
}

std::string ScriptedProvider::next_action_completion(const std::string& prompt,
                                                     double temperature) const {
  const ParsedHistory h = parse_rendered_history(prompt);
  if (sabotaged(h.instruction)) {
    return completion_for("I will try something else.", config_.sabotage_action);
  }
  const auto it = config_.plans.find(h.instruction);
  if (it != config_.plans.end() && !it->second.actions.empty()) {
    const auto& plan = it->second;
    const std::size_t k = std::min(h.actions.size(), plan.actions.size() - 1);
    const std::string rationale =
        k < plan.rationales.size() ? plan.rationales[k] : "Next I will " + plan.actions[k] + ".";
    return completion_for(rationale, plan.actions[k]);
  }
  if (!config_.action_table.empty()) {
    std::vector<std::pair<std::string, double>> rows(config_.action_table.begin(),
                                                     config_.action_table.end());
    std::size_t pick = 0;
    if (temperature <= 0.0) {
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].second > rows[pick].second) pick = i;
      }
    } else {
      std::vector<double> w;
      double total = 0.0;
      for (const auto& r : rows) {
        w.push_back(r.second > 0.0 ? std::pow(r.second, 1.0 / temperature) : 0.0);
        total += w.back();
      }
      Rng rng(call_seed(config_.seed, prompt, temperature));
      double u = rng.uniform() * total;
      pick = rows.size() - 1;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (u < w[i]) {
          pick = i;
          break;
        }
        u -= w[i];
      }
    }
    return completion_for("This looks like the right move.", rows[pick].first);
  }
  return "Thought: I am not sure what to do next.";
}

std::string ScriptedProvider::generate(const std::string& prompt, std::size_t max_chars,
                                       double temperature) {
  std::string out;
  bool matched = false;
  for (const auto& rule : config_.completions) {
    if (prompt.find(rule.contains) != std::string::npos) {
      out = rule.text;
      matched = true;
      break;
    }
  }
  if (matched) {
    // Canned text is returned whole; length policing belongs to callers.
    return out;
  }
  if (prompt.find(kSuccessBlock) != std::string::npos) {
    const std::string section = prompt.substr(prompt.find(kSuccessBlock));
    const auto explored = section.find(kExploredBlock);
    const ParsedHistory h = parse_rendered_history(section.substr(0, explored));
    out = "Task Knowledge: When your task is to " + goal_of(h.instruction) +
          ", you should head straight for the places that matter and skip detours. The action "
          "workflows are:";
    for (std::size_t i = 0; i < h.actions.size(); ++i) {
      out += " " + std::to_string(i + 1) + ") " + h.actions[i];
    }
    out += ".";
  } else if (prompt.find(kStateAnswerFormat) != std::string::npos) {
    const auto at = prompt.find("The trajectory:");
    out = "State Knowledge: " +
          scripted_state_summary(parse_rendered_history(
              at == std::string::npos ? std::string_view(prompt)
                                      : std::string_view(prompt).substr(at)));
  } else if (ends_with_cue(prompt, "Task Knowledge:")) {
    const ParsedHistory h = parse_rendered_history(prompt);
    out = "When your task is to " + goal_of(h.instruction) +
          ", you should first find the object, then carry out what the task asks with it. The "
          "action workflows are: 1) locate the object 2) take it 3) finish the task.";
  } else if (config_.role == ProviderRole::kAgent) {
    out = next_action_completion(prompt, temperature);
  } else {
    out = "I have nothing to add.";
  }
  (void)max_chars;
  return out;
}

std::vector<double> ScriptedProvider::token_scores(const std::vector<std::string>& actions) const {
  std::vector<std::vector<std::string>> toks;
  for (const auto& a : actions) toks.push_back(split_tokens(canonical_action_id(a)));
  std::vector<double> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::size_t shared = 0;
    for (std::size_t j = 0; j < toks.size(); ++j) {
      if (i == j) continue;
      std::size_t c = 0;
      while (c < toks[i].size() && c < toks[j].size() && toks[i][c] == toks[j][c]) ++c;
      if (c == toks[i].size()) throw PreconditionError("duplicate action " + actions[i]);
      shared = std::max(shared, c);
    }
    double p = 1.0;
    std::string path;
    for (std::size_t l = 0; l <= shared; ++l) {
      path += (l ? " " : "") + toks[i][l];
      const auto it = config_.token_table.find(path);
      if (it == config_.token_table.end()) {
        throw PreconditionError("token table has no entry for \"" + path + "\"");
      }
      p *= it->second;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> ScriptedProvider::score_actions(const std::string& prompt,
                                                    const std::vector<std::string>& actions) {
  if (actions.empty()) throw PreconditionError("score_actions: empty action list");
  if (!config_.token_table.empty()) return token_scores(actions);
  if (!config_.action_table.empty()) {
    std::vector<double> out;
    for (const auto& a : actions) {
      const auto it = config_.action_table.find(canonical_action_id(a));
      if (it == config_.action_table.end()) {
        throw PreconditionError("action_table has no entry for \"" + a + "\"");
      }
      out.push_back(it->second);
    }
    return out;
  }
  const std::size_t n = actions.size();
  std::vector<double> out(n, 1.0 / static_cast<double>(n));
  const ParsedHistory h = parse_rendered_history(prompt);
  std::string target;
  if (sabotaged(h.instruction)) {
    target = config_.sabotage_action;
  } else if (const auto it = config_.plans.find(h.instruction);
             it != config_.plans.end() && !it->second.actions.empty()) {
    target = it->second.actions[std::min(h.actions.size(), it->second.actions.size() - 1)];
  }
  if (target.empty()) return out;
  const std::string id = canonical_action_id(target);
  for (std::size_t i = 0; i < n; ++i) {
    if (canonical_action_id(actions[i]) != id) continue;
    const double rest = n > 1 ? (1.0 - config_.plan_mass) / static_cast<double>(n - 1) : 0.0;
    std::fill(out.begin(), out.end(), rest);
    out[i] = n > 1 ? config_.plan_mass : 1.0;
    break;
  }
  return out;
}

Embedding ScriptedProvider::embed(const std::string& text) {
  if (text.empty()) throw PreconditionError("embed: empty text");
  return feature_hash_embedding(text, config_.dimension);
}

}  // namespace wkm
