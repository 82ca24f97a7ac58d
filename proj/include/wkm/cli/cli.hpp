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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/cli/config.hpp"

namespace wkm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitInternal = 4;

inline constexpr std::string_view kStageNames[] = {
    "gen-suite", "explore", "synthesize", "build-kb", "emit-train", "plan", "eval", "sweep"};

// Runs one stage. Returns kExitOk when the stage ran or was already up to
// date, kExitTransport when some items failed on provider transport (their
// outputs are written but the stage manifest is not, so a rerun retries).
// Throws the library's error types for everything else.
int run_stage(std::string_view stage, const RunConfig& config, std::size_t jobs,
              std::ostream& out);

// Full command line: `wkm <stage> --config PATH [overrides]`. Errors are
// reported on `err` as one JSON object and mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wkm::cli
