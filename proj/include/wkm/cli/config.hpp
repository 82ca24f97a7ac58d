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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/core/trajectory.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/planner/planner.hpp"

namespace wkm::cli {

struct ScriptedSource {
  std::optional<std::filesystem::path> tables;  // ScriptedConfig JSON
  bool oracle_plans = false;                    // follow the suite's oracle plans
  std::uint64_t seed = 0;
};

struct RemoteSource {
  std::string url;
  int timeout_seconds = 60;
  bool concurrent = false;
};

// Exactly one of the two sources is set.
struct ProviderBinding {
  std::optional<ScriptedSource> scripted;
  std::optional<RemoteSource> remote;
};

struct RunConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  env::EnvConfig env;
  env::SuiteSizes sizes;

  ProviderBinding agent;
  ProviderBinding wkm;

  std::optional<std::filesystem::path> templates_dir;
  std::optional<std::filesystem::path> examples_dir;
  std::filesystem::path output_dir;
  bool chosen_only = false;

  PlannerConfig planner;
  Split plan_split = Split::kTestSeen;

  std::vector<Split> eval_splits;
  std::vector<double> eval_gammas;
  std::vector<double> sweep_gammas;

  // Effective configuration with defaults filled in, in a fixed key order.
  Json canonical;

  std::string hash() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

struct Overrides {
  std::optional<double> gamma;
  std::optional<std::string> mode;
  std::optional<std::string> split;
  std::optional<std::uint64_t> seed;
};

// Parses TOML (".toml") or JSON (anything else). Throws ConfigError when
// the file is absent or unreadable.
Json read_config_document(const std::filesystem::path& path);

// Validates the document, applies overrides and fills defaults. Throws
// ConfigError on unknown keys, bad values, a role bound to zero or two
// sources, or a referenced path that does not exist.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir,
                       const Overrides& overrides = {});

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace wkm::cli
