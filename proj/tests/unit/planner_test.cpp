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

#include "support.hpp"
#include "wkm/common/error.hpp"
#include "wkm/planner/planner.hpp"

namespace wkm {
namespace {

const env::TaskSuite& suite() {
  static const env::TaskSuite s =
      env::generate_suite(env::EnvConfig::defaults(EnvKind::kHousehold, 13), {20, 5, 5});
  return s;
}

ScriptedProvider oracle_agent() {
  ScriptedConfig c;
  for (const auto& t : suite().tasks) c.plans[t.instruction.text] = ScriptedPlan{t.oracle_plan, {}};
  return ScriptedProvider(c);
}

// Counts state-knowledge prompts on top of a scripted knowledge model.
class CountingWkm final : public Provider {
 public:
  ProviderRole role() const override { return ProviderRole::kWkm; }
  std::string generate(const std::string& prompt, std::size_t max_chars, double t) override {
    if (prompt.find(kStateAnswerFormat) != std::string::npos) ++state_calls;
    return inner_.generate(prompt, max_chars, t);
  }
  std::vector<double> score_actions(const std::string& p,
                                    const std::vector<std::string>& a) override {
    return inner_.score_actions(p, a);
  }
  Embedding embed(const std::string& text) override { return inner_.embed(text); }
  int state_calls = 0;

 private:
  ScriptedProvider inner_{ScriptedConfig{ProviderRole::kWkm}};
};

EpisodeTrace trace_with(std::string id, std::size_t steps, double reward, bool valid = true) {
  EpisodeTrace t;
  t.task.id = std::move(id);
  t.reward = reward;
  for (std::size_t i = 0; i < steps; ++i) {
    TraceStep s;
    s.was_valid = valid;
    t.steps.push_back(s);
  }
  return t;
}

TEST(PlannerMode, ParseRoundTrip) {
  for (auto m : {PlannerMode::kFull, PlannerMode::kNoState, PlannerMode::kNoTask,
                 PlannerMode::kExplicitState}) {
    EXPECT_EQ(parse_planner_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_planner_mode("fast"), ConfigError);
}

TEST(PlannerConfig, Validation) {
  PlannerConfig c;
  c.mode = PlannerMode::kNoState;
  c.retrieval_n = 10;
  EXPECT_THROW(c.validate(), ConfigError);
  c.mode = PlannerMode::kFull;
  EXPECT_NO_THROW(c.validate());
  c.retrieval_n = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.retrieval_n.reset();
  c.fusion.gamma = 2.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(PlannerConfig{}.effective_n(), kDefaultRetrievalN);
  PlannerConfig explicit_state;
  explicit_state.mode = PlannerMode::kExplicitState;
  explicit_state.fusion.gamma = 0.3;
  EXPECT_EQ(explicit_state.effective_gamma(), 1.0);
}

TEST(PlannerContext, MissingComponents) {
  ScriptedProvider agent = oracle_agent();
  PlannerContext ctx;
  ctx.agent = &agent;
  EXPECT_THROW(ctx.validate(), PreconditionError);
  CountingWkm wkm;
  ctx.wkm = &wkm;
  EXPECT_THROW(ctx.validate(), PreconditionError);  // full mode needs a KB
  ctx.config.mode = PlannerMode::kNoState;
  EXPECT_NO_THROW(ctx.validate());
  ctx.wkm = &agent;
  EXPECT_THROW(ctx.validate(), PreconditionError);
}

TEST(RunEpisode, NoStateOracleNeverSummarizes) {
  ScriptedProvider agent = oracle_agent();
  CountingWkm wkm;
  PlannerContext ctx;
  ctx.agent = &agent;
  ctx.wkm = &wkm;
  ctx.config.mode = PlannerMode::kNoState;
  const env::TaskSpec& task = *suite().split(Split::kTestSeen).front();
  const EpisodeTrace t = run_episode(task, ctx);
  EXPECT_EQ(t.reward, 1.0);
  EXPECT_FALSE(t.aborted);
  EXPECT_FALSE(t.hallucinated());
  EXPECT_EQ(t.steps.size(), task.oracle_plan.size());
  EXPECT_EQ(wkm.state_calls, 0);
  EXPECT_TRUE(t.task_knowledge.has_value());
  EXPECT_EQ(t.gamma, 1.0);
}

TEST(RunEpisode, FullModeWithEmptyKbFallsBackToAgent) {
  ScriptedProvider agent = oracle_agent();
  CountingWkm wkm;
  const KnowledgeBase kb;
  PlannerContext ctx;
  ctx.agent = &agent;
  ctx.wkm = &wkm;
  ctx.kb = &kb;
  const env::TaskSpec& task = *suite().split(Split::kTestSeen).front();
  const EpisodeTrace t = run_episode(task, ctx);
  EXPECT_EQ(t.reward, 1.0);
  EXPECT_FALSE(t.steps.front().state_knowledge.has_value());
  EXPECT_EQ(wkm.state_calls, static_cast<int>(t.steps.size()) - 1);
  for (const auto& s : t.steps) EXPECT_TRUE(s.kb_silent);
}

TEST(Evaluate, OracleMetrics) {
  ScriptedProvider agent = oracle_agent();
  CountingWkm wkm;
  PlannerContext ctx;
  ctx.agent = &agent;
  ctx.wkm = &wkm;
  ctx.config.mode = PlannerMode::kNoState;
  const auto tasks = suite().split(Split::kTestUnseen);
  const Evaluation e = evaluate(tasks, ctx, 2);
  double steps = 0.0;
  for (const auto* t : tasks) steps += static_cast<double>(t->oracle_plan.size());
  EXPECT_EQ(e.metrics.avg_reward, 1.0);
  EXPECT_DOUBLE_EQ(e.metrics.avg_steps, steps / static_cast<double>(tasks.size()));
  EXPECT_EQ(e.metrics.hallucinatory_rate, 0.0);
  ASSERT_EQ(e.traces.size(), tasks.size());
  EXPECT_EQ(e.traces[0].task.id, tasks[0]->instruction.id);
}

TEST(SummarizeTraces, Averages) {
  EpisodeTrace aborted = trace_with("c", 6, 0.9, false);
  aborted.aborted = true;
  const MetricsReport m =
      summarize_traces({trace_with("a", 2, 1.0), trace_with("b", 4, 0.5), aborted});
  EXPECT_EQ(m.n_tasks, 3u);
  EXPECT_DOUBLE_EQ(m.avg_steps, 4.0);
  EXPECT_DOUBLE_EQ(m.avg_reward, 0.5);
  EXPECT_DOUBLE_EQ(m.hallucinatory_rate, 1.0 / 3.0);
  EXPECT_EQ(m.per_task[2].reward, 0.0);
  EXPECT_EQ(summarize_traces({}).n_tasks, 0u);
}

TEST(Sweep, SingleGamma) {
  ScriptedProvider agent = oracle_agent();
  CountingWkm wkm;
  const KnowledgeBase kb;
  PlannerContext ctx;
  ctx.agent = &agent;
  ctx.wkm = &wkm;
  ctx.kb = &kb;
  const auto rows = sweep_gamma({0.4}, suite().split(Split::kTestSeen), ctx);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].gamma, 0.4);
  EXPECT_EQ(rows[0].metrics.avg_reward, 1.0);
  EXPECT_THROW(sweep_gamma({}, suite().split(Split::kTestSeen), ctx), PreconditionError);
}

TEST(Reporting, FormatPercent) {
  EXPECT_EQ(format_percent(0.0), "0.00%");
  EXPECT_EQ(format_percent(0.125), "12.50%");
  EXPECT_EQ(format_percent(1.0), "100.00%");
}

TEST(Reporting, WinRate) {
  const MetricsReport a = summarize_traces({trace_with("x", 3, 1), trace_with("y", 5, 1),
                                            trace_with("z", 4, 1)});
  const MetricsReport b = summarize_traces({trace_with("x", 4, 1), trace_with("y", 5, 1),
                                            trace_with("z", 2, 1)});
  EXPECT_DOUBLE_EQ(win_rate(a, b), 0.5);
  EXPECT_THROW(win_rate(a, summarize_traces({trace_with("q", 1, 1)})), PreconditionError);
}

}  // namespace
}  // namespace wkm
