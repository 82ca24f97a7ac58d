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

#include "wkm/env/suite.hpp"

#include <cstdio>
#include <map>
#include <memory>

#include "family.hpp"
#include "wkm/common/error.hpp"
#include "wkm/common/random.hpp"

namespace wkm::env {

namespace {

std::unique_ptr<detail::Family> make_family(const EnvConfig& config) {
  switch (config.kind) {
    case EnvKind::kHousehold: return detail::make_household(config.seed);
    case EnvKind::kShopping: return detail::make_shopping(config.seed);
    case EnvKind::kScience: return detail::make_science(config.seed);
  }
  throw Error("unknown env kind");
}

std::string task_id(EnvKind kind, Split split, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return std::string(to_string(kind)) + "-" + std::string(to_string(split)) + "-" + buf;
}

TaskSpec make_task(const EnvConfig& config, const detail::Family& family,
                   const detail::Combo& combo, detail::Group group, Split split, std::size_t index,
                   std::uint64_t target_seed, std::uint64_t distractor_seed) {
  detail::BuiltTask built = family.build(combo, group, target_seed, distractor_seed);
  TaskSpec t;
  t.instruction = TaskInstruction{task_id(config.kind, split, index), built.instruction, split,
                                  config.kind};
  t.goal_template = combo.templ;
  t.initial_observation = std::move(built.observation);
  t.initial_state = std::move(built.world);
  t.initial_state.max_steps = config.max_steps;
  t.initial_state.reward_mode = config.reward_mode;
  t.oracle_plan = std::move(built.plan);
  t.oracle_rationales = std::move(built.rationales);

  for (const auto& g : t.initial_state.subgoals) {
    if (t.initial_state.holds(g)) {
      throw Error("generated task " + t.instruction.id + " starts with a satisfied subgoal");
    }
  }
  if (t.oracle_plan.size() > static_cast<std::size_t>(config.max_steps)) {
    throw RangeError("oracle plan for " + t.instruction.id + " exceeds max_steps");
  }
  return t;
}

}  // namespace

std::vector<const TaskSpec*> TaskSuite::split(Split s) const {
  std::vector<const TaskSpec*> out;
  for (const auto& t : tasks) {
    if (t.instruction.split == s) out.push_back(&t);
  }
  return out;
}

const TaskSpec* TaskSuite::find(std::string_view id) const {
  for (const auto& t : tasks) {
    if (t.instruction.id == id) return &t;
  }
  return nullptr;
}

SuiteSizes template_capacity(const EnvConfig& config) {
  const auto family = make_family(config);
  const std::size_t seen = family->pool(detail::Group::kSeen).size();
  return SuiteSizes{seen, seen, family->pool(detail::Group::kUnseen).size()};
}

TaskSuite generate_suite(const EnvConfig& config, const SuiteSizes& sizes) {
  config.validate();
  if (sizes.n_train == 0 || sizes.n_seen == 0 || sizes.n_unseen == 0) {
    throw PreconditionError("generate_suite: split counts must be at least 1");
  }
  const auto family = make_family(config);
  std::vector<detail::Combo> seen_pool = family->pool(detail::Group::kSeen);
  std::vector<detail::Combo> unseen_pool = family->pool(detail::Group::kUnseen);
  if (sizes.n_train > seen_pool.size() || sizes.n_seen > sizes.n_train ||
      sizes.n_unseen > unseen_pool.size()) {
    throw RangeError("generate_suite: requested " + std::to_string(sizes.n_train) + "/" +
                     std::to_string(sizes.n_seen) + "/" + std::to_string(sizes.n_unseen) +
                     " tasks but capacity is " + std::to_string(seen_pool.size()) + "/" +
                     std::to_string(std::min(sizes.n_train, seen_pool.size())) + "/" +
                     std::to_string(unseen_pool.size()));
  }

  const std::uint64_t seed = config.seed;
  Rng order(derive_seed(seed, "suite/order"));
  order.shuffle(seen_pool);
  order.shuffle(unseen_pool);

  TaskSuite suite;
  suite.config = config;
  suite.sizes = sizes;
  std::vector<std::uint64_t> target_seeds;
  for (std::size_t i = 0; i < sizes.n_train; ++i) {
    const auto& combo = seen_pool[i];
    target_seeds.push_back(derive_seed(seed, "suite/target/" + combo.key()));
    suite.tasks.push_back(make_task(config, *family, combo, detail::Group::kSeen, Split::kTrain, i,
                                    target_seeds.back(),
                                    derive_seed(seed, "suite/train/" + std::to_string(i))));
  }
  std::vector<std::size_t> twins(sizes.n_train);
  for (std::size_t i = 0; i < twins.size(); ++i) twins[i] = i;
  order.shuffle(twins);
  for (std::size_t j = 0; j < sizes.n_seen; ++j) {
    const std::size_t i = twins[j];
    suite.tasks.push_back(make_task(config, *family, seen_pool[i], detail::Group::kSeen,
                                    Split::kTestSeen, j, target_seeds[i],
                                    derive_seed(seed, "suite/seen/" + std::to_string(j))));
  }
  for (std::size_t k = 0; k < sizes.n_unseen; ++k) {
    const auto& combo = unseen_pool[k];
    suite.tasks.push_back(make_task(config, *family, combo, detail::Group::kUnseen,
                                    Split::kTestUnseen, k,
                                    derive_seed(seed, "suite/target/" + combo.key()),
                                    derive_seed(seed, "suite/unseen/" + std::to_string(k))));
  }

  // Each instruction text must determine its plan.
  std::map<std::string, const std::vector<std::string>*> plans;
  for (const auto& t : suite.tasks) {
    auto [it, fresh] = plans.emplace(t.instruction.text, &t.oracle_plan);
    if (!fresh && *it->second != t.oracle_plan) {
      throw Error("generate_suite: instruction maps to two different plans: " + t.instruction.id);
    }
  }
  for (const auto& t : suite.tasks) expert_trajectory(t);
  return suite;
}

ResetResult reset(const TaskSpec& task) {
  return ResetResult{task.instruction, task.initial_observation,
                     enumerate_actions(task.initial_state), task.initial_state};
}

ResetResult reset(const TaskSuite& suite, std::size_t task_index) {
  if (task_index >= suite.tasks.size()) {
    throw RangeError("reset: unknown task index " + std::to_string(task_index));
  }
  return reset(suite.tasks[task_index]);
}

Json suite_manifest(const TaskSuite& suite) {
  Json tasks = Json::array();
  for (const auto& t : suite.tasks) {
    tasks.push_back(Json{{"id", t.instruction.id},
                         {"split", to_string(t.instruction.split)},
                         {"instruction", t.instruction.text},
                         {"oracle_plan", t.oracle_plan}});
  }
  return Json{{"env_kind", to_string(suite.config.kind)},
              {"seed", suite.config.seed},
              {"max_steps", suite.config.max_steps},
              {"reward_mode", to_string(suite.config.reward_mode)},
              {"sizes",
               Json{{"n_train", suite.sizes.n_train},
                    {"n_seen", suite.sizes.n_seen},
                    {"n_unseen", suite.sizes.n_unseen}}},
              {"tasks", std::move(tasks)}};
}

void write_suite_manifest(const std::filesystem::path& path, const TaskSuite& suite) {
  write_json_file(path, suite_manifest(suite));
}

TaskSuite load_suite_manifest(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  TaskSuite suite;
  try {
    EnvConfig config;
    config.kind = parse_env_kind(j.at("env_kind").get<std::string>());
    config.seed = j.at("seed").get<std::uint64_t>();
    config.max_steps = j.at("max_steps").get<int>();
    config.reward_mode = parse_reward_mode(j.at("reward_mode").get<std::string>());
    const Json& s = j.at("sizes");
    suite = generate_suite(config, SuiteSizes{s.at("n_train").get<std::size_t>(),
                                              s.at("n_seen").get<std::size_t>(),
                                              s.at("n_unseen").get<std::size_t>()});
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": malformed suite manifest: " + e.what());
  }
  if (suite_manifest(suite) != j) {
    throw FormatError(path.string() + ": suite manifest does not match its regenerated suite");
  }
  return suite;
}

Trajectory expert_trajectory(const TaskSpec& task) {
  WorldState w = task.initial_state;
  Trajectory t;
  t.task = task.instruction;
  t.source = TrajectorySource::kExpert;
  for (std::size_t i = 0; i < task.oracle_plan.size(); ++i) {
    if (w.done) throw Error("oracle plan for " + task.instruction.id + " ends early");
    const ActionRecord a(task.oracle_rationales[i], task.oracle_plan[i]);
    StepOutcome out = step(w, a);
    if (!out.was_valid) {
      throw Error("oracle plan for " + task.instruction.id + " has invalid action " +
                  task.oracle_plan[i]);
    }
    t.steps.push_back(Step{a, std::move(out.observation), std::nullopt});
  }
  if (!w.done || w.reward != 1.0) {
    throw Error("oracle plan for " + task.instruction.id + " does not reach reward 1");
  }
  t.reward = 1.0;
  t.validate();
  return t;
}

}  // namespace wkm::env
