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

#include <atomic>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include "wkm/common/error.hpp"
#include "wkm/common/json.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/provider/provider.hpp"
#include "wkm/provider/scripted.hpp"

namespace wkm::testing {

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("wkm-test-" + name + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

// Agent stub with caller-set scores per action id; unlisted actions score 0.
class FixedScoreAgent final : public Provider {
 public:
  std::map<std::string, double> scores;

  ProviderRole role() const override { return ProviderRole::kAgent; }
  std::string generate(const std::string&, std::size_t, double) override { return {}; }
  std::vector<double> score_actions(const std::string&,
                                    const std::vector<std::string>& actions) override {
    std::vector<double> out;
    for (const auto& a : actions) {
      auto it = scores.find(a);
      out.push_back(it == scores.end() ? 0.0 : it->second);
    }
    return out;
  }
  Embedding embed(const std::string& text) override { return feature_hash_embedding(text, 64); }
};

// Agent stub that knows each task's world. At the first step it scores the
// oracle action highest. Afterwards it puts `wrong_mass` on an action that
// is invalid in the current world and the rest on the oracle's next action.
class WrongAgent final : public Provider {
 public:
  WrongAgent(const env::TaskSuite& suite, std::map<std::string, double> wrong_mass)
      : suite_(suite), wrong_mass_(std::move(wrong_mass)) {}

  ProviderRole role() const override { return ProviderRole::kAgent; }
  std::string generate(const std::string&, std::size_t, double) override { return {}; }
  Embedding embed(const std::string& text) override { return feature_hash_embedding(text, 64); }

  std::vector<double> score_actions(const std::string& prompt,
                                    const std::vector<std::string>& actions) override {
    const ParsedHistory h = parse_rendered_history(prompt);
    const env::TaskSpec* task = nullptr;
    for (const auto& t : suite_.tasks) {
      if (t.instruction.text == h.instruction) task = &t;
    }
    if (task == nullptr) throw PreconditionError("WrongAgent: unknown instruction");
    env::WorldState world = env::reset(*task).state;
    std::size_t progress = 0;
    for (std::size_t i = 0; i < h.actions.size(); ++i) {
      if (i < h.observations.size() && h.observations[i] == env::kNothingHappens) continue;
      env::step(world, ActionRecord("", h.actions[i]));
      ++progress;
    }
    const std::string right =
        progress < task->oracle_plan.size() ? canonical_action_id(task->oracle_plan[progress]) : "";
    std::vector<double> out(actions.size(), 0.0);
    if (h.actions.empty()) {
      for (std::size_t i = 0; i < actions.size(); ++i) out[i] = actions[i] == right ? 1.0 : 0.0;
      return out;
    }
    const double w = wrong_mass_.at(task->instruction.id);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i] == right) {
        out[i] = 1.0 - w;
        continue;
      }
      env::WorldState probe = world;
      if (!env::step(probe, ActionRecord("", actions[i])).was_valid) {
        out[i] = w;
        for (std::size_t j = i + 1; j < actions.size(); ++j) {
          if (actions[j] == right) out[j] = 1.0 - w;
        }
        break;
      }
    }
    return out;
  }

 private:
  const env::TaskSuite& suite_;
  std::map<std::string, double> wrong_mass_;
};

// JSON run configuration for a hermetic household run writing to `out`.
inline Json household_run_config(const std::filesystem::path& out, std::uint64_t seed = 7) {
  return Json{
      {"env",
       {{"kind", "household"}, {"seed", seed}, {"n_train", 50}, {"n_seen", 10}, {"n_unseen", 10}}},
      {"provider",
       {{"agent", {{"scripted", {{"oracle_plans", true}}}}},
        {"wkm", {{"scripted", Json::object()}}}}},
      {"pipeline", {{"output_dir", out.string()}}},
      {"planner", {{"mode", "full"}, {"gamma", 0.4}, {"split", "test-seen"}}},
      {"eval",
       {{"splits", Json::array({"test-seen", "test-unseen"})}, {"gammas", Json::array({0.4})}}}};
}

}  // namespace wkm::testing
