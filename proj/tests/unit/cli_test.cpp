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

#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "wkm/cli/cli.hpp"
#include "wkm/cli/config.hpp"
#include "wkm/common/error.hpp"

namespace wkm::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const Json& doc) {
  const fs::path p = dir / "run.json";
  write_json_file(p, doc);
  return p;
}

Outcome stage(const std::string& name, const fs::path& config,
              std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {name, "--config", config.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

TEST(Config, TomlAndJsonHashAlike) {
  const fs::path dir = testing::scratch_dir("cfg-same");
  write_text_file(dir / "run.toml",
                  "[env]\nkind = \"household\"\nseed = 7\n\n"
                  "[provider.agent.scripted]\noracle_plans = true\n\n"
                  "[provider.wkm.scripted]\n\n"
                  "[planner]\nmode = \"full\"\ngamma = 0.4\n");
  const Json doc = {{"env", {{"kind", "household"}, {"seed", 7}}},
                    {"provider",
                     {{"agent", {{"scripted", {{"oracle_plans", true}}}}},
                      {"wkm", {{"scripted", Json::object()}}}}},
                    {"planner", {{"mode", "full"}, {"gamma", 0.4}}}};
  write_json_file(dir / "run.json", doc);
  EXPECT_EQ(load_config(dir / "run.toml").hash(), load_config(dir / "run.json").hash());
  const RunConfig c = load_config(dir / "run.json");
  EXPECT_EQ(c.resolve(c.output_dir), dir / "wkm-out");
}

TEST(Config, StrictKeysAndSources) {
  const fs::path dir = testing::scratch_dir("cfg-bad");
  Json doc = testing::household_run_config(dir / "out");
  Json unknown = doc;
  unknown["planner"]["temperature"] = 0.5;
  EXPECT_THROW(parse_config(unknown, dir), ConfigError);
  Json both = doc;
  both["provider"]["agent"]["remote"] = {{"url", "http://127.0.0.1:1"}};
  EXPECT_THROW(parse_config(both, dir), ConfigError);
  Json missing_tables = doc;
  missing_tables["provider"]["wkm"]["scripted"]["tables"] = "nowhere.json";
  EXPECT_THROW(parse_config(missing_tables, dir), ConfigError);
  Json bad_gamma = doc;
  bad_gamma["planner"]["gamma"] = 1.5;
  EXPECT_THROW(parse_config(bad_gamma, dir), ConfigError);
  EXPECT_THROW(load_config(dir / "absent.toml"), ConfigError);
}

TEST(Config, OverridesChangeHash) {
  const fs::path dir = testing::scratch_dir("cfg-ovr");
  const Json doc = testing::household_run_config(dir / "out");
  Overrides o;
  o.gamma = 0.7;
  const RunConfig c = parse_config(doc, dir, o);
  EXPECT_EQ(c.planner.fusion.gamma, 0.7);
  EXPECT_EQ(c.eval_gammas, (std::vector<double>{0.7}));
  EXPECT_NE(c.hash(), parse_config(doc, dir).hash());
}

TEST(Cli, UsageAndConfigErrors) {
  EXPECT_EQ(invoke({"plan"}).code, kExitConfig);
  EXPECT_EQ(invoke({"launch", "--config", "x"}).code, kExitConfig);
  const fs::path dir = testing::scratch_dir("cli-cfg");
  Json doc = testing::household_run_config(dir / "out");
  doc["env"]["kind"] = "kitchen";
  const Outcome r = stage("gen-suite", write_config(dir, doc));
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_EQ(Json::parse(r.err).at("exit_code"), kExitConfig);
}

TEST(Cli, PlanBeforeKbIsMissingInput) {
  const fs::path dir = testing::scratch_dir("cli-order");
  const fs::path cfg = write_config(dir, testing::household_run_config(dir / "out"));
  ASSERT_EQ(stage("gen-suite", cfg).code, kExitOk);
  const Outcome r = stage("plan", cfg);
  EXPECT_EQ(r.code, kExitMissingInput);
  const Json err = Json::parse(r.err);
  EXPECT_EQ(err.at("exit_code"), kExitMissingInput);
  EXPECT_FALSE(err.at("message").get<std::string>().empty());
}

TEST(Cli, UnreachableRemoteIsTransportFailure) {
  const fs::path dir = testing::scratch_dir("cli-remote");
  Json doc = testing::household_run_config(dir / "out");
  doc["provider"]["agent"] = {{"remote", {{"url", "http://127.0.0.1:1"}, {"timeout_seconds", 2}}}};
  const fs::path cfg = write_config(dir, doc);
  ASSERT_EQ(stage("gen-suite", cfg).code, kExitOk);
  const Outcome r = stage("explore", cfg);
  EXPECT_EQ(r.code, kExitTransport) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "explore" / "manifest.json"));
}

class FullPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::scratch_dir("cli-full"));
    const fs::path cfg = write_config(*dir_, testing::household_run_config(*dir_ / "out"));
    for (std::string_view s : kStageNames) {
      const Outcome r = stage(std::string(s), cfg, {"--jobs", "2"});
      ASSERT_EQ(r.code, kExitOk) << s << ": " << r.err;
    }
  }
  static void TearDownTestSuite() { delete dir_; }
  static fs::path config() { return *dir_ / "run.json"; }
  static fs::path out() { return *dir_ / "out"; }

  static fs::path* dir_;
};

fs::path* FullPipeline::dir_ = nullptr;

TEST_F(FullPipeline, ProducesEveryOutput) {
  for (const char* f : {"suite/suite.json", "suite/experts.jsonl", "explore/explored.jsonl",
                        "synthesize/task_knowledge.jsonl", "synthesize/annotated.jsonl",
                        "kb/kb.jsonl", "train/agent.jsonl", "train/wkm.jsonl",
                        "plan/test-seen/traces.jsonl", "eval/metrics.json", "eval/metrics.csv",
                        "sweep/test-seen/sweep.csv"}) {
    EXPECT_TRUE(fs::exists(out() / f)) << f;
  }
  const std::string csv = testing::slurp(out() / "eval" / "metrics.csv");
  EXPECT_EQ(csv.rfind("split,gamma,mode,avg_reward,avg_steps,halluc_rate\n", 0), 0u);
  EXPECT_NE(csv.find("test-seen,0.4,full,1.0000,"), std::string::npos) << csv;
}

TEST_F(FullPipeline, ManifestHashMatchesConfig) {
  const Json m = read_json_file(out() / "eval" / "manifest.json");
  EXPECT_EQ(m.at("stage"), "eval");
  EXPECT_EQ(m.at("config_hash"), load_config(config()).hash());
}

TEST_F(FullPipeline, RestartIsNoOp) {
  const std::string before = testing::slurp(out() / "kb" / "kb.jsonl");
  const auto stamp = fs::last_write_time(out() / "kb" / "kb.jsonl");
  const Outcome r = stage("build-kb", config());
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("up to date"), std::string::npos) << r.out;
  EXPECT_EQ(testing::slurp(out() / "kb" / "kb.jsonl"), before);
  EXPECT_EQ(fs::last_write_time(out() / "kb" / "kb.jsonl"), stamp);
}

TEST_F(FullPipeline, GammaOverrideReachesCsv) {
  const Outcome r = stage("eval", config(), {"--gamma", "0.7", "--split", "test-seen"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = testing::slurp(out() / "eval" / "metrics.csv");
  EXPECT_NE(csv.find("test-seen,0.7,full,"), std::string::npos) << csv;
  EXPECT_EQ(csv.find("test-unseen"), std::string::npos) << csv;
  ASSERT_EQ(stage("eval", config()).code, kExitOk);
}

TEST_F(FullPipeline, BinaryRunsStage) {
  const std::string cmd = std::string(WKM_CLI_PATH) + " build-kb --config " + config().string() +
                          " > " + (*dir_ / "bin.out").string();
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(testing::slurp(*dir_ / "bin.out").find("up to date"), std::string::npos);
}

}  // namespace
}  // namespace wkm::cli
