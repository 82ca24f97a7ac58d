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

#include <gtest/gtest.h>

#include "wkm/common/error.hpp"
#include "wkm/fusion/fusion.hpp"

namespace wkm {
namespace {

ActionDistribution dist(std::vector<double> p) {
  ActionDistribution d;
  for (std::size_t i = 0; i < p.size(); ++i) d.action_ids.push_back("a" + std::to_string(i));
  d.probs = std::move(p);
  return d;
}

ActionScores raw(std::vector<double> s) {
  ActionScores a;
  for (std::size_t i = 0; i < s.size(); ++i) a.action_ids.push_back("a" + std::to_string(i));
  a.scores = std::move(s);
  return a;
}

TEST(Normalize, SoftmaxForUnnormalizedScores) {
  const ActionDistribution d = normalize_agent_scores(raw({1.0, 2.0, 3.0}));
  ASSERT_EQ(d.probs.size(), 3u);
  EXPECT_NEAR(d.probs[0], 0.0900, 1e-4);
  EXPECT_NEAR(d.probs[1], 0.2447, 1e-4);
  EXPECT_NEAR(d.probs[2], 0.6652, 1e-4);
  EXPECT_NO_THROW(d.validate());
}

TEST(Normalize, ProbabilitiesPassThrough) {
  const ActionDistribution d = normalize_agent_scores(raw({0.7, 0.3}));
  EXPECT_NEAR(d.probs[0], 0.7, 1e-12);
  EXPECT_NEAR(d.probs[1], 0.3, 1e-12);
}

TEST(Normalize, RejectsDegenerateScores) {
  EXPECT_THROW(normalize_agent_scores(raw({0.0, 0.0})), PreconditionError);
  EXPECT_THROW(normalize_agent_scores(raw({-1.0, 2.0})), PreconditionError);
}

TEST(Fuse, GammaEndpoints) {
  const ActionDistribution agent = dist({0.6, 0.4});
  const ActionDistribution know = dist({0.2, 0.8});
  EXPECT_EQ(fuse_argmax(agent, know, {1.0}).index, 0u);
  EXPECT_EQ(fuse_argmax(agent, know, {0.0}).index, 1u);
}

TEST(Fuse, WeightedMixture) {
  const FusionResult r = fuse_argmax(dist({0.5, 0.3, 0.2}), dist({0.1, 0.8, 0.1}), {0.4});
  ASSERT_EQ(r.fused.size(), 3u);
  EXPECT_NEAR(r.fused[0], 0.26, 1e-12);
  EXPECT_NEAR(r.fused[1], 0.60, 1e-12);
  EXPECT_NEAR(r.fused[2], 0.14, 1e-12);
  EXPECT_EQ(r.index, 1u);
  EXPECT_EQ(r.action_id, "a1");
  EXPECT_FALSE(r.kb_silent);
}

TEST(Fuse, TiesGoToLowestIndex) {
  EXPECT_EQ(fuse_argmax(dist({0.25, 0.5, 0.25}), dist({0.5, 0.0, 0.5}), {0.5}).index, 0u);
  EXPECT_EQ(argmax({1.0, 3.0, 3.0}), 1u);
}

TEST(Fuse, SilentKbFallsBackToAgent) {
  const FusionResult r = fuse_argmax(dist({0.3, 0.7}), std::nullopt, {0.0});
  EXPECT_TRUE(r.kb_silent);
  EXPECT_EQ(r.index, 1u);
  EXPECT_EQ(r.fused, (std::vector<double>{0.3, 0.7}));
}

TEST(Fuse, RejectsBadInputs) {
  EXPECT_THROW(fuse_argmax(dist({0.5, 0.5}), dist({1.0}), {0.5}), PreconditionError);
  EXPECT_THROW(fuse_argmax(dist({0.5, 0.5}), std::nullopt, {1.5}), ConfigError);
  EXPECT_THROW(fuse_argmax(dist({0.5, 0.5}), std::nullopt, {-0.1}), ConfigError);
}

TEST(Fuse, DefaultGammaPerKind) {
  for (auto k : {EnvKind::kHousehold, EnvKind::kScience, EnvKind::kShopping}) {
    EXPECT_NO_THROW(FusionConfig{default_gamma(k)}.validate());
  }
}

TEST(Distribution, Validate) {
  EXPECT_NO_THROW(dist({0.25, 0.75}).validate());
  EXPECT_THROW(dist({0.5, 0.6}).validate(), PreconditionError);
  ActionDistribution bad = dist({1.0});
  bad.action_ids.push_back("extra");
  EXPECT_THROW(bad.validate(), PreconditionError);
}

}  // namespace
}  // namespace wkm
