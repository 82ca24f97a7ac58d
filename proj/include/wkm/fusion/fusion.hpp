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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/core/trajectory.hpp"
#include "wkm/fusion/distribution.hpp"
#include "wkm/provider/provider.hpp"

namespace wkm {

// Scores that already sum to 1 within 1e-6 are rescaled to sum to exactly
// 1; anything else goes through a softmax. Throws PreconditionError when no
// score is positive.
ActionDistribution normalize_agent_scores(const ActionScores& scores);

enum class KbFallback { kAgentOnly };

struct FusionConfig {
  double gamma = 0.4;
  KbFallback kb_fallback = KbFallback::kAgentOnly;

  // Throws ConfigError unless 0 <= gamma <= 1.
  void validate() const;
};

// 0.4 household, 0.5 shopping, 0.7 science.
double default_gamma(EnvKind kind);

struct FusionResult {
  std::size_t index = 0;
  std::string action_id;
  // gamma * p_agent + (1 - gamma) * p_know, or p_agent alone when the KB is
  // silent.
  std::vector<double> fused;
  bool kb_silent = false;
};

// Argmax of the fused scores; ties go to the lowest index. Throws
// PreconditionError when the two enumerations differ.
FusionResult fuse_argmax(const ActionDistribution& p_agent,
                         const std::optional<ActionDistribution>& p_know,
                         const FusionConfig& config);

// Lowest index of the largest value.
std::size_t argmax(const std::vector<double>& values);

}  // namespace wkm
