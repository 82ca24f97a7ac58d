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

#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "wkm/common/error.hpp"
#include "wkm/core/render.hpp"
#include "wkm/kb/knowledge_base.hpp"
#include "wkm/provider/operations.hpp"
#include "wkm/provider/remote.hpp"
#include "wkm/provider/scripted.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm {
namespace {

Trajectory tiny(TrajectorySource source, double reward) {
  Trajectory t;
  t.task = TaskInstruction{"t-1", "Your task is to: examine the book with the desklamp.",
                           Split::kTrain, EnvKind::kHousehold};
  t.source = source;
  t.reward = reward;
  t.steps = {Step{ActionRecord("find it", "go to bed 1"), "On the bed 1, you see a book 1.", {}},
             Step{ActionRecord("", "take book 1 from bed 1"), "You pick up the book 1.", {}}};
  return t;
}

PreferencePair tiny_pair() {
  return PreferencePair(tiny(TrajectorySource::kExpert, 1.0),
                        tiny(TrajectorySource::kExplored, 0.0));
}

ScriptedProvider scripted(ProviderRole role, std::vector<ScriptedConfig::Completion> canned = {}) {
  ScriptedConfig c;
  c.role = role;
  c.completions = std::move(canned);
  return ScriptedProvider(c);
}

// Records prompts and answers with a fixed text.
class EchoProvider final : public Provider {
 public:
  explicit EchoProvider(std::string answer, ProviderRole role = ProviderRole::kAgent)
      : answer_(std::move(answer)), role_(role) {}
  ProviderRole role() const override { return role_; }
  std::string generate(const std::string& prompt, std::size_t, double) override {
    last_prompt = prompt;
    return answer_;
  }
  std::vector<double> score_actions(const std::string&, const std::vector<std::string>& a) override {
    return std::vector<double>(a.size(), 1.0);
  }
  Embedding embed(const std::string&) override { return {1.0}; }
  std::string last_prompt;

 private:
  std::string answer_;
  ProviderRole role_;
};

TEST(Templates, BuiltinsValidate) {
  for (auto n : {TemplateName::kTaskKnow, TemplateName::kStateKnow, TemplateName::kPlan}) {
    EXPECT_NO_THROW(PromptTemplate::builtin(n));
    EXPECT_FALSE(builtin_example(n).empty());
  }
}

TEST(Templates, RejectsMissingUnknownAndRepeatedPlaceholders) {
  EXPECT_THROW(PromptTemplate(TemplateName::kPlan, "{history}"), ConfigError);
  EXPECT_THROW(PromptTemplate(TemplateName::kPlan, "{example}{history}{trajectory}"), ConfigError);
  EXPECT_THROW(PromptTemplate(TemplateName::kPlan, "{example}{history}{history}"), ConfigError);
  EXPECT_THROW(PromptTemplate(TemplateName::kTaskKnow,
                              "{example}{success_trajectory}{explored_trajectory}"),
               ConfigError);
}

TEST(Templates, ChosenOnlyDropsExploredBlock) {
  const PromptTemplate t = PromptTemplate::builtin(TemplateName::kTaskKnow).chosen_only();
  EXPECT_EQ(t.text().find(kExploredBlock), std::string::npos);
  EXPECT_NE(t.text().find(kSuccessBlock), std::string::npos);
  EchoProvider agent("Task Knowledge: When x, do y.");
  generate_task_knowledge(agent, tiny_pair(), PromptTemplate::builtin(TemplateName::kTaskKnow), "",
                          true);
  EXPECT_EQ(agent.last_prompt.find("Explored Trajectory:"), std::string::npos);
  generate_task_knowledge(agent, tiny_pair(), PromptTemplate::builtin(TemplateName::kTaskKnow));
  EXPECT_NE(agent.last_prompt.find("Explored Trajectory:"), std::string::npos);
}

TEST(Templates, LoadFallsBackToBuiltins) {
  const auto dir = testing::scratch_dir("templates");
  write_text_file(dir / "plan.txt", "Go.\n{example}\n{history}");
  const auto t = load_templates(dir);
  EXPECT_EQ(t.at(TemplateName::kPlan).text(), "Go.\n{example}\n{history}");
  EXPECT_EQ(t.at(TemplateName::kStateKnow).text(),
            PromptTemplate::builtin(TemplateName::kStateKnow).text());
}

TEST(TaskKnowledge, CannedCompletionIsParsed) {
  const std::string body =
      "When you cannot find the object required for the task under the desklamp, first check "
      "all the drawers.";
  ScriptedProvider agent =
      scripted(ProviderRole::kAgent, {{"Success Trajectory:", "Task Knowledge: " + body}});
  const TaskKnowledge k = generate_task_knowledge(
      agent, tiny_pair(), PromptTemplate::builtin(TemplateName::kTaskKnow));
  EXPECT_EQ(k.text, body);
  EXPECT_EQ(k.task_id, "t-1");
  EXPECT_EQ(k.text.rfind("When you cannot find the object", 0), 0u);
}

TEST(TaskKnowledge, MissingMarkerIsFormatError) {
  EchoProvider agent("I would check the drawers.");
  try {
    generate_task_knowledge(agent, tiny_pair(), PromptTemplate::builtin(TemplateName::kTaskKnow));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.raw(), "I would check the drawers.");
  }
}

TEST(TaskKnowledge, RequiresAgentRole) {
  EchoProvider wkm("Task Knowledge: When x", ProviderRole::kWkm);
  EXPECT_THROW(generate_task_knowledge(wkm, tiny_pair(),
                                       PromptTemplate::builtin(TemplateName::kTaskKnow)),
               PreconditionError);
}

TEST(TaskKnowledge, PlanTimeFromInstruction) {
  ScriptedProvider wkm = scripted(ProviderRole::kWkm);
  const TaskKnowledge k = generate_task_knowledge(wkm, tiny(TrajectorySource::kExpert, 1).task);
  EXPECT_EQ(k.text.rfind("When", 0), 0u);
}

TEST(StateKnowledge, CannedText) {
  ScriptedProvider p = scripted(
      ProviderRole::kWkm, {{"go to bed 1",
                            "State Knowledge: Your task is to examine a book with the desklamp. "
                            "You have not found the desklamp yet, and have only checked the bed 1."}});
  const StateKnowledge s =
      generate_state_knowledge(p, render_history(tiny(TrajectorySource::kExpert, 1), 1),
                               PromptTemplate::builtin(TemplateName::kStateKnow), "t-1", 0);
  EXPECT_EQ(s.text.rfind("Your task is to examine a book with the desklamp.", 0), 0u);
  EXPECT_NE(s.text.find("have not found the desklamp yet"), std::string::npos);
  EXPECT_EQ(s.step_index, 0u);
}

TEST(StateKnowledge, LongAnswerTruncatedWithWarning) {
  EchoProvider p("State Knowledge: " + std::string(10000, 'x'), ProviderRole::kWkm);
  std::vector<std::string> warnings;
  const StateKnowledge s = generate_state_knowledge(
      p, "Task Instruction: x\n", PromptTemplate::builtin(TemplateName::kStateKnow), "t", 3, "",
      [&](const std::string& m) { warnings.push_back(m); });
  EXPECT_LE(s.text.size(), kStateKnowledgeMaxChars);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(StateKnowledge, TruncationKeepsUtf8Whole) {
  std::string body(699, 'a');
  body += "\xC3\xA9\xC3\xA9";  // two-byte characters straddling the limit
  EchoProvider p("State Knowledge: " + body, ProviderRole::kWkm);
  const StateKnowledge s = generate_state_knowledge(
      p, "Task Instruction: x\n", PromptTemplate::builtin(TemplateName::kStateKnow), "t", 0, "",
      [](const std::string&) {});
  EXPECT_EQ(s.text.size(), 699u);
}

TEST(ScoreActions, ActionTableEcho) {
  ScriptedConfig c;
  c.action_table = {{"go to desk 1", 0.7}, {"look", 0.3}};
  ScriptedProvider p(c);
  const ActionScores s = score_actions(p, "prompt", {"go to desk 1", "look"});
  EXPECT_EQ(s.scores, (std::vector<double>{0.7, 0.3}));
}

TEST(ScoreActions, TokenTriePrefixExtension) {
  ScriptedConfig c;
  c.token_table = {{"go", 0.6},
                   {"go to", 1.0},
                   {"go to desk", 0.7},
                   {"go to bed", 0.3},
                   {"look", 0.3},
                   {"look </s>", 0.5},
                   {"look around", 0.5}};
  ScriptedProvider p(c);
  const auto s = p.score_actions("", {"go to desk 1", "go to bed 1", "look", "look around"});
  // Hand-enumerated trie: each action multiplies the conditionals along its
  // path up to the first token that tells it apart from every other action.
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[0], 0.6 * 1.0 * 0.7);
  EXPECT_DOUBLE_EQ(s[1], 0.6 * 1.0 * 0.3);
  EXPECT_DOUBLE_EQ(s[2], 0.3 * 0.5);
  EXPECT_DOUBLE_EQ(s[3], 0.3 * 0.5);
  EXPECT_NE(s[0], s[1]);
}

TEST(ScoreActions, TokenTrieMissingEntry) {
  ScriptedConfig c;
  c.token_table = {{"go", 1.0}};
  ScriptedProvider p(c);
  EXPECT_THROW(p.score_actions("", {"go to desk 1", "go to bed 1"}), PreconditionError);
}

TEST(ScoreActions, ContractViolations) {
  ScriptedProvider p = scripted(ProviderRole::kAgent);
  EXPECT_THROW(score_actions(p, "x", {}), PreconditionError);
  ScriptedProvider wkm = scripted(ProviderRole::kWkm);
  EXPECT_THROW(score_actions(wkm, "x", {"look"}), PreconditionError);
  ScriptedConfig c;
  c.action_table = {{"look", 0.0}};
  ScriptedProvider zero(c);
  EXPECT_THROW(score_actions(zero, "x", {"look"}), FormatError);
}

TEST(Embed, DeterministicAndSelfSimilar) {
  ScriptedProvider p = scripted(ProviderRole::kWkm);
  const Embedding a = embed_text(p, "You are holding the book 1.");
  EXPECT_EQ(a, embed_text(p, "You are holding the book 1."));
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  EXPECT_EQ(a.size(), 64u);
  EXPECT_THROW(embed_text(p, ""), PreconditionError);
}

TEST(Embed, DisjointWordsAreDissimilar) {
  const Embedding a = feature_hash_embedding("apple banana cherry", 64);
  const Embedding b = feature_hash_embedding("desk lamp window", 64);
  EXPECT_LT(cosine(a, b), 0.5);
}

TEST(Embed, FeatureHashBuckets) {
  // Independent FNV-1a over each lowercased word; bit 32 picks the sign.
  auto fnv = [](const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
  };
  Embedding want(16, 0.0);
  for (const std::string w : {"desk", "lamp", "desk"}) {
    const std::uint64_t h = fnv(w);
    want[h % 16] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  }
  EXPECT_EQ(feature_hash_embedding("Desk, LAMP desk!", 16), want);
}

TEST(ProposeAction, ScriptedPlanStepK) {
  const Trajectory t = tiny(TrajectorySource::kExpert, 1.0);
  ScriptedConfig c;
  c.plans[t.task.text] = ScriptedPlan{{"go to bed 1", "take book 1 from bed 1", "go to desk 1"}, {}};
  ScriptedProvider p(c);
  EXPECT_EQ(propose_action(p, render_history(t, 0), 0.0).action_text(), "go to bed 1");
  EXPECT_EQ(propose_action(p, render_history(t, 2), 0.0).action_text(), "go to desk 1");
}

TEST(ProposeAction, MissingActionLineIsUnparseable) {
  const ActionRecord r = parse_action_completion("I think we should look around first.");
  EXPECT_TRUE(r.parse_failed());
  EXPECT_EQ(r.action_text(), "");
  const ActionRecord ok = parse_action_completion("Thought: go.\nAction: go to desk 1");
  EXPECT_EQ(ok.rationale(), "go.");
  EXPECT_EQ(ok.action_id(), "go to desk 1");
}

TEST(ProposeAction, SamplingFollowsTableFrequencies) {
  ScriptedConfig c;
  c.seed = 17;
  c.action_table = {{"put book 1 in/on lamp 9", 0.9}, {"go to desk 1", 0.1}};
  ScriptedProvider p(c);
  int invalid = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string prompt = "Task Instruction: draw " + std::to_string(i) + "\n";
    invalid += propose_action(p, prompt, 1.0).action_id() == "put book 1 in/on lamp 9";
  }
  EXPECT_NEAR(invalid / 1000.0, 0.9, 0.03);
}

class RemoteFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      auth_ = req.get_header_value("Authorization");
      const Json body = Json::parse(req.body);
      res.set_content(Json{{"text", "echo:" + body.at("role").get<std::string>()}}.dump(),
                      "application/json");
    });
    server_.Post("/v1/score_actions", [](const httplib::Request& req, httplib::Response& res) {
      const Json body = Json::parse(req.body);
      Json scores = Json::array();
      for (std::size_t i = 0; i < body.at("actions").size(); ++i) scores.push_back(i + 1.0);
      res.set_content(Json{{"scores", scores}}.dump(), "application/json");
    });
    server_.Post("/v1/embed", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(Json{{"vector", Embedding(++calls_ == 1 ? 4 : 3, 0.5)}}.dump(),
                      "application/json");
    });
    server_.Post("/v1/broken", [](const httplib::Request&, httplib::Response& res) {
      res.status = 500;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  RemoteConfig config(ProviderRole role = ProviderRole::kAgent) {
    RemoteConfig c;
    c.url = "http://127.0.0.1:" + std::to_string(port_);
    c.role = role;
    c.bearer_token = "secret";
    c.timeout_seconds = 5;
    return c;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::string auth_;
  std::atomic<int> calls_{0};
};

TEST_F(RemoteFixture, GenerateSendsRoleAndBearer) {
  RemoteProvider p(config(ProviderRole::kWkm));
  EXPECT_EQ(p.generate("hi", 10, 0.0), "echo:wkm");
  EXPECT_EQ(auth_, "Bearer secret");
}

TEST_F(RemoteFixture, ScoreActions) {
  RemoteProvider p(config());
  EXPECT_EQ(p.score_actions("x", {"a", "b"}), (std::vector<double>{1.0, 2.0}));
}

TEST_F(RemoteFixture, EmbedDimensionPinned) {
  RemoteProvider p(config());
  EXPECT_EQ(p.embed("a").size(), 4u);
  EXPECT_THROW(p.embed("b"), DimensionMismatch);
}

TEST_F(RemoteFixture, UnreachableIsTransportError) {
  RemoteConfig c = config();
  c.url = "http://127.0.0.1:1";
  RemoteProvider p(c);
  EXPECT_THROW(p.generate("x", 1, 0.0), TransportError);
}

TEST(Remote, MissingUrlIsConfigError) {
  EXPECT_THROW(RemoteProvider(RemoteConfig{}), ConfigError);
}

}  // namespace
}  // namespace wkm
