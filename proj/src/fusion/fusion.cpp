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

#include "wkm/fusion/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "wkm/common/error.hpp"

namespace wkm {

void ActionDistribution::validate() const {
  if (action_ids.size() != probs.size()) {
    throw PreconditionError("distribution has " + std::to_string(action_ids.size()) +
                            " actions but " + std::to_string(probs.size()) + " probabilities");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw PreconditionError("distribution has a negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw PreconditionError("distribution sums to " + std::to_string(sum));
  }
}

ActionDistribution normalize_agent_scores(const ActionScores& scores) {
  if (scores.scores.size() != scores.action_ids.size()) {
    throw PreconditionError("scores and action ids differ in length");
  }
  double sum = 0.0;
  bool positive = false;
  for (double s : scores.scores) {
    if (!std::isfinite(s) || s < 0.0) throw PreconditionError("raw scores must be finite and >= 0");
    positive = positive || s > 0.0;
    sum += s;
  }
  if (!positive) throw PreconditionError("raw scores are all zero");
  ActionDistribution d;
  d.action_ids = scores.action_ids;
  if (std::abs(sum - 1.0) <= 1e-6) {
    for (double s : scores.scores) d.probs.push_back(s / sum);
    return d;
  }
  const double top = *std::max_element(scores.scores.begin(), scores.scores.end());
  double z = 0.0;
  for (double s : scores.scores) {
    d.probs.push_back(std::exp(s - top));
    z += d.probs.back();
  }
  for (double& p : d.probs) p /= z;
  return d;
}

void FusionConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
}

double default_gamma(EnvKind kind) {
  switch (kind) {
    case EnvKind::kHousehold: return 0.4;
    case EnvKind::kShopping: return 0.5;
    case EnvKind::kScience: return 0.7;
  }
  return 0.4;
}

std::size_t argmax(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

FusionResult fuse_argmax(const ActionDistribution& p_agent,
                         const std::optional<ActionDistribution>& p_know,
                         const FusionConfig& config) {
  config.validate();
  if (p_agent.probs.empty() || p_agent.probs.size() != p_agent.action_ids.size()) {
    throw PreconditionError("fuse_argmax: malformed agent distribution");
  }
  FusionResult out;
  if (!p_know) {
    out.fused = p_agent.probs;
    out.kb_silent = true;
  } else {
    if (p_know->action_ids != p_agent.action_ids || p_know->probs.size() != p_agent.probs.size()) {
      throw PreconditionError("fuse_argmax: action enumerations differ");
    }
    const double g = config.gamma;
    out.fused.resize(p_agent.probs.size());
    for (std::size_t i = 0; i < out.fused.size(); ++i) {
      out.fused[i] = g * p_agent.probs[i] + (1.0 - g) * p_know->probs[i];
    }
  }
  out.index = argmax(out.fused);
  out.action_id = p_agent.action_ids[out.index];
  return out;
}

}  // namespace wkm
