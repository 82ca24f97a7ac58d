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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wkm/cli/cli.hpp"
#include "wkm/cli/config.hpp"
#include "wkm/common/random.hpp"
#include "wkm/core/render.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/fusion/fusion.hpp"
#include "wkm/kb/knowledge_base.hpp"
#include "wkm/pipeline/pipeline.hpp"
#include "wkm/planner/planner.hpp"
#include "wkm/provider/scripted.hpp"

namespace fs = std::filesystem;
using namespace wkm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = rng.uniform() + 1e-3;
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

std::size_t first_max(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::vector<std::string> action_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("go to shelf " + std::to_string(i + 1));
  return out;
}

Outcome fusion_degenerate() {
  Rng rng(derive_seed(2024, "acceptance/fusion"));
  int agree_agent = 0;
  int agree_know = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng.index(12);
    const auto ids = action_names(n);
    const ActionDistribution pa{ids, random_simplex(rng, n)};
    const ActionDistribution pk{ids, random_simplex(rng, n)};
    const auto r1 = fuse_argmax(pa, pk, FusionConfig{1.0});
    const auto r0 = fuse_argmax(pa, pk, FusionConfig{0.0});
    agree_agent += r1.index == first_max(pa.probs) && r1.action_id == ids[first_max(pa.probs)];
    agree_know += r0.index == first_max(pk.probs) && r0.action_id == ids[first_max(pk.probs)];
  }
  return {agree_agent == trials && agree_know == trials,
          std::to_string(agree_agent) + "/1000 match agent argmax at gamma=1, " +
              std::to_string(agree_know) + "/1000 match knowledge argmax at gamma=0"};
}

Outcome counting_oracle() {
  Rng rng(derive_seed(2024, "acceptance/counting"));
  const std::vector<std::string> pool = action_names(8);
  int exact = 0;
  int silent = 0;
  double worst_sum = 0.0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const std::size_t m = 1 + rng.index(60);
    std::vector<KBRecord> records;
    for (std::size_t i = 0; i < m; ++i) {
      records.push_back(KBRecord{"state " + std::to_string(i), {rng.uniform(), rng.uniform()},
                                 "look", pool[rng.index(pool.size())], "t", i});
    }
    const KnowledgeBase kb(records);
    std::vector<std::string> available;
    for (const auto& a : pool) {
      if (rng.chance(0.6)) available.push_back(a);
    }
    if (available.empty()) available.push_back(pool[0]);
    RetrievalResult r;
    r.requested = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.chance(0.7)) r.neighbors.push_back(Neighbor{i, 0.5});
    }

    std::vector<double> counts(available.size(), 0.0);
    double total = 0.0;
    for (const auto& nb : r.neighbors) {
      const auto& next = records[nb.position].next_action;
      for (std::size_t i = 0; i < available.size(); ++i) {
        if (available[i] == next) {
          counts[i] += 1.0;
          total += 1.0;
        }
      }
    }
    const auto got = next_action_distribution(r, kb, available);
    if (total == 0.0) {
      silent += !got.has_value();
      exact += !got.has_value();
      continue;
    }
    if (!got) continue;
    std::vector<double> want(available.size());
    for (std::size_t i = 0; i < available.size(); ++i) want[i] = counts[i] / total;
    const double sum = std::accumulate(got->probs.begin(), got->probs.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    exact += got->probs == want && got->action_ids == available && std::abs(sum - 1.0) <= 1e-9;
  }
  return {exact == trials, std::to_string(exact) + "/500 exact (" + std::to_string(silent) +
                               " empty retrievals), worst |sum-1| " + sci(worst_sum)};
}

double brute_cosine(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Outcome knn_oracle() {
  Rng rng(derive_seed(2024, "acceptance/knn"));
  const std::vector<std::string> prev = {"go to desk 1", "open drawer 1", "look", "inventory",
                                         "take mug 1 from desk 1"};
  auto gaussian = [&rng] {
    const double u1 = rng.uniform() + 1e-12;
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  int matches = 0;
  std::size_t returned = 0;
  std::size_t filtered_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + rng.index(1000);
    std::vector<KBRecord> records;
    for (std::size_t i = 0; i < m; ++i) {
      Embedding e(64);
      for (auto& x : e) x = gaussian();
      records.push_back(KBRecord{"s", std::move(e), prev[rng.index(prev.size())], "look", "t", i});
    }
    const KnowledgeBase kb(records);
    Embedding q(64);
    for (auto& x : q) x = gaussian();
    const std::string& a_pre = prev[rng.index(prev.size())];
    const std::size_t n = 1 + rng.index(1200);

    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < m; ++i) {
      if (records[i].prev_action == a_pre) {
        all.emplace_back(brute_cosine(q, records[i].state_embedding), i);
      }
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    all.resize(std::min(n, all.size()));

    const RetrievalResult r = knn(kb, q, a_pre, n);
    bool same = r.neighbors.size() == all.size();
    for (std::size_t i = 0; same && i < all.size(); ++i) {
      same = r.neighbors[i].position == all[i].second &&
             std::abs(r.neighbors[i].similarity - all[i].first) <= 1e-12;
    }
    for (const auto& nb : r.neighbors) {
      ++returned;
      filtered_ok += kb.records()[nb.position].prev_action == a_pre;
    }
    matches += same;
  }
  return {matches == 100 && filtered_ok == returned,
          std::to_string(matches) + "/100 match the full-sort oracle, " +
              std::to_string(filtered_ok) + "/" + std::to_string(returned) +
              " neighbors satisfy the previous-action filter"};
}

Outcome hallucination_suppression() {
  const env::TaskSuite suite =
      env::generate_suite(env::EnvConfig::defaults(EnvKind::kHousehold, 4), {40, 5, 5});
  const auto train = suite.split(Split::kTrain);
  ScriptedConfig wc;
  wc.role = ProviderRole::kWkm;
  ScriptedProvider wkm(wc);
  testing::FixedScoreAgent agent;
  Rng rng(derive_seed(2024, "acceptance/hallucination"));

  int invalid_full = 0;
  int invalid_agent_only = 0;
  int ordering_ok = 0;
  const int situations = 100;
  for (int s = 0; s < situations; ++s) {
    const env::TaskSpec& task = *train[rng.index(train.size())];
    const std::size_t k = 1 + rng.index(task.oracle_plan.size() - 1);
    env::ResetResult start = env::reset(task);
    env::WorldState world = start.state;
    HistoryWriter history(task.instruction.text);
    for (std::size_t i = 0; i < k; ++i) {
      history.action(task.oracle_plan[i]);
      history.observation(env::step(world, ActionRecord("", task.oracle_plan[i])).observation);
    }
    const std::string valid = canonical_action_id(task.oracle_plan[k]);
    const std::string prev = canonical_action_id(task.oracle_plan[k - 1]);
    std::vector<std::string> invalid_pool;
    for (const auto& a : start.available_actions) {
      env::WorldState probe = world;
      if (!env::step(probe, ActionRecord("", a)).was_valid) invalid_pool.push_back(a);
    }
    const std::string invalid = invalid_pool[rng.index(invalid_pool.size())];

    std::vector<KBRecord> records;
    for (int i = 0; i < 5; ++i) {
      const std::string text = "state " + std::to_string(s) + "/" + std::to_string(i);
      records.push_back(KBRecord{text, wkm.embed(text), prev, valid, task.instruction.id, k});
      const std::string other = "elsewhere " + std::to_string(i);
      records.push_back(KBRecord{other, wkm.embed(other), "inventory", invalid, "x", 0});
    }
    const KnowledgeBase kb(records);
    agent.scores = {{invalid, 0.9}, {valid, 0.1}};

    PlannerContext full;
    full.agent = &agent;
    full.wkm = &wkm;
    full.kb = &kb;
    full.config.fusion.gamma = 0.4;
    PlannerContext bare = full;
    bare.kb = nullptr;
    bare.config.mode = PlannerMode::kNoState;

    auto is_invalid = [&](const std::string& a) {
      env::WorldState probe = world;
      return !env::step(probe, ActionRecord("", a)).was_valid;
    };
    HistoryWriter h1 = history;
    const Decision d = decide(full, h1, start.available_actions, prev, task.instruction.id, k);
    HistoryWriter h2 = history;
    const Decision b = decide(bare, h2, start.available_actions, prev, task.instruction.id, k);
    invalid_full += is_invalid(d.fusion.action_id);
    invalid_agent_only += is_invalid(b.fusion.action_id);

    const auto& ids = d.p_agent.action_ids;
    const auto vi = std::find(ids.begin(), ids.end(), valid) - ids.begin();
    const auto ii = std::find(ids.begin(), ids.end(), invalid) - ids.begin();
    ordering_ok += std::abs(d.fusion.fused[vi] - 0.64) <= 1e-12 &&
                   std::abs(d.fusion.fused[ii] - 0.36) <= 1e-12 &&
                   d.fusion.fused[vi] > d.fusion.fused[ii];
  }
  const double full_rate = invalid_full / double(situations);
  const double bare_rate = invalid_agent_only / double(situations);
  return {full_rate == 0.0 && bare_rate >= 0.8 && ordering_ok == situations,
          "invalid selections: full gamma=0.4 " + num(100 * full_rate, 0) + "%, no_state " +
              num(100 * bare_rate, 0) + "%; fused 0.64 vs 0.36 on " + std::to_string(ordering_ok) +
              "/100 steps"};
}

struct PipelineRun {
  fs::path root;
  cli::RunConfig config;
};

PipelineRun run_pipeline(const std::string& name, std::size_t jobs) {
  const fs::path root = testing::scratch_dir(name);
  PipelineRun run{root, cli::parse_config(testing::household_run_config(root / "out"), root)};
  std::ostringstream log;
  for (std::string stage :
       {"gen-suite", "explore", "synthesize", "build-kb", "emit-train", "plan", "eval"}) {
    const int code = cli::run_stage(stage, run.config, jobs, log);
    if (code != cli::kExitOk) throw Error(stage + " exited with " + std::to_string(code));
  }
  return run;
}

Outcome end_to_end() {
  const PipelineRun run = run_pipeline("acceptance-e2e", 1);
  const fs::path out = run.root / "out";
  const env::TaskSuite suite = env::load_suite_manifest(out / "suite" / "suite.json");
  const auto seen = suite.split(Split::kTestSeen);
  double oracle_steps = 0.0;
  for (const auto* t : seen) oracle_steps += static_cast<double>(t->oracle_plan.size());
  oracle_steps /= static_cast<double>(seen.size());

  const Json metrics = read_json_file(out / "eval" / "metrics.json");
  for (const auto& r : metrics.at("runs")) {
    if (r.at("split") != "test-seen") continue;
    const Json& m = r.at("metrics");
    const double reward = m.at("avg_reward").get<double>();
    const double steps = m.at("avg_steps").get<double>();
    const double halluc = m.at("hallucinatory_rate").get<double>();
    return {reward == 1.0 && steps == oracle_steps && halluc == 0.0,
            "seen reward " + num(reward) + ", steps " + num(steps, 2) + " vs oracle " +
                num(oracle_steps, 2) + ", hallucinatory " + num(100 * halluc, 2) + "%"};
  }
  return {false, "no test-seen run in metrics.json"};
}

Outcome training_masks() {
  const Json fx = read_json_file(fs::path(WKM_FIXTURE_DIR) / "desklamp.json");
  const Trajectory traj = trajectory_from_json(fx.at("trajectory"));
  const TaskKnowledge know{traj.task.id, fx.at("task_knowledge").get<std::string>()};

  auto expected_spans = [](const std::string& text, const Json& masked) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t cursor = 0;
    for (const auto& m : masked) {
      const std::string piece = m.get<std::string>();
      const std::size_t at = text.find(piece, cursor);
      if (at == std::string::npos) return std::vector<std::pair<std::size_t, std::size_t>>{};
      spans.emplace_back(at, at + piece.size());
      cursor = at + piece.size();
    }
    return spans;
  };

  const TrainingRecord agent = agent_training_record(traj, know);
  const TrainingRecord wkm = wkm_training_record(traj, know);
  const auto want_agent = expected_spans(agent.full_text, fx.at("agent_masked"));
  const auto want_wkm = expected_spans(wkm.full_text, fx.at("wkm_masked"));
  const TrainingCorpora corpora = emit_training({traj}, {{traj.task.id, know}});
  std::size_t leaks = 0;
  for (const auto& r : corpora.agent) {
    for (std::size_t p = r.full_text.find("State Knowledge:"); p != std::string::npos;
         p = r.full_text.find("State Knowledge:", p + 1)) {
      ++leaks;
    }
  }
  const bool agent_ok = !want_agent.empty() && agent.mask_spans == want_agent;
  const bool wkm_ok = !want_wkm.empty() && wkm.mask_spans == want_wkm;
  return {agent_ok && wkm_ok && leaks == 0,
          "agent spans " + std::to_string(agent.mask_spans.size()) + "/" +
              std::to_string(want_agent.size()) + (agent_ok ? " exact" : " differ") +
              ", wkm spans " + std::to_string(wkm.mask_spans.size()) + "/" +
              std::to_string(want_wkm.size()) + (wkm_ok ? " exact" : " differ") +
              ", agent-corpus state markers " + std::to_string(leaks)};
}

Outcome kb_fencepost() {
  ScriptedConfig sc;
  sc.role = ProviderRole::kWkm;
  ScriptedProvider wkm(sc);
  const PromptTemplate tpl = PromptTemplate::builtin(TemplateName::kStateKnow);
  struct Batch {
    EnvKind kind;
    std::size_t n;
  };
  std::size_t checked = 0;
  std::size_t good = 0;
  for (const Batch b : {Batch{EnvKind::kHousehold, 110}, Batch{EnvKind::kScience, 50},
                        Batch{EnvKind::kShopping, 40}}) {
    const env::TaskSuite suite = env::generate_suite(env::EnvConfig::defaults(b.kind, 3), {b.n, 1, 1});
    for (const auto* task : suite.split(Split::kTrain)) {
      const Trajectory expert = env::expert_trajectory(*task);
      const SummaryResult states = summarize_states(expert, wkm, tpl, std::nullopt, {},
                                                    [](const std::string&) {});
      const KbBuildResult kb = build_kb_records(expert, states.states, wkm);
      bool ok = states.states.size() == expert.steps.size() &&
                kb.records.size() + 1 == expert.steps.size();
      for (std::size_t t = 0; ok && t < kb.records.size(); ++t) {
        ok = kb.records[t].prev_action == expert.steps[t].action.action_id() &&
             kb.records[t].next_action == expert.steps[t + 1].action.action_id();
      }
      good += ok;
      ++checked;
    }
  }
  return {checked == 200 && good == checked,
          std::to_string(good) + "/" + std::to_string(checked) +
              " trajectories yield steps-1 records"};
}

Outcome determinism() {
  const PipelineRun a = run_pipeline("acceptance-det-a", 1);
  const PipelineRun b = run_pipeline("acceptance-det-b", 4);
  const fs::path oa = a.root / "out";
  const fs::path ob = b.root / "out";
  std::vector<fs::path> files = {"explore/explored.jsonl",   "synthesize/task_knowledge.jsonl",
                                 "synthesize/annotated.jsonl", "kb/kb.jsonl",
                                 "train/agent.jsonl",       "train/wkm.jsonl",
                                 "plan/test-seen/traces.jsonl", "eval/metrics.json",
                                 "eval/metrics.csv"};
  for (const auto& e : fs::directory_iterator(oa / "eval")) {
    const auto name = e.path().filename().string();
    if (name.rfind("traces-", 0) == 0) files.push_back(fs::path("eval") / name);
  }
  std::size_t same = 0;
  std::string differing;
  for (const auto& f : files) {
    if (fs::exists(ob / f) && testing::slurp(oa / f) == testing::slurp(ob / f)) {
      ++same;
    } else {
      differing += " " + f.string();
    }
  }
  return {same == files.size(), std::to_string(same) + "/" + std::to_string(files.size()) +
                                    " files byte-identical (runs with 1 and 4 jobs)" +
                                    (differing.empty() ? "" : "; differ:" + differing)};
}

Outcome gamma_sweep() {
  const env::TaskSuite suite =
      env::generate_suite(env::EnvConfig::defaults(EnvKind::kHousehold, 11), {50, 10, 10});
  const auto seen = suite.split(Split::kTestSeen);
  ScriptedConfig wc;
  wc.role = ProviderRole::kWkm;
  ScriptedProvider wkm(wc);
  const PromptTemplate tpl = PromptTemplate::builtin(TemplateName::kStateKnow);
  std::vector<KBRecord> records;
  for (const auto* task : seen) {
    const Trajectory expert = env::expert_trajectory(*task);
    const auto states =
        summarize_states(expert, wkm, tpl, std::nullopt, {}, [](const std::string&) {});
    const auto built = build_kb_records(expert, states.states, wkm);
    records.insert(records.end(), built.records.begin(), built.records.end());
  }
  const KnowledgeBase kb(records);

  Rng rng(derive_seed(2024, "acceptance/sweep"));
  std::map<std::string, double> wrong_mass;
  for (const auto* task : seen) wrong_mass[task->instruction.id] = 0.55 + 0.4 * rng.uniform();
  testing::WrongAgent agent(suite, wrong_mass);

  PlannerContext ctx;
  ctx.agent = &agent;
  ctx.wkm = &wkm;
  ctx.kb = &kb;
  ctx.config.retrieval_n = 1;
  const std::vector<double> gammas = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto rows = sweep_gamma(gammas, seen, ctx);

  PlannerContext bare = ctx;
  bare.kb = nullptr;
  bare.config.mode = PlannerMode::kNoState;
  bare.config.retrieval_n.reset();
  const MetricsReport no_state = evaluate(seen, bare).metrics;

  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].metrics.avg_reward > rows[i - 1].metrics.avg_reward) monotone = false;
    curve += (i ? ", " : "") + num(rows[i].gamma, 2) + ":" + num(rows[i].metrics.avg_reward, 2);
  }
  const bool degenerate_equal = rows.back().metrics == no_state;
  return {monotone && degenerate_equal,
          "reward by gamma {" + curve + "}; gamma=1 report " +
              (degenerate_equal ? "equals" : "differs from") + " no_state report"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fusion degenerate equivalence", 1.0, fusion_degenerate},
      {2, "next-action counting oracle", 1.0, counting_oracle},
      {3, "kNN oracle equivalence", 10.0, knn_oracle},
      {4, "hallucination suppression", 5.0, hallucination_suppression},
      {5, "end-to-end pipeline oracle", 60.0, end_to_end},
      {6, "training-corpus masks", 1.0, training_masks},
      {7, "KB fencepost", 1.0, kb_fencepost},
      {8, "determinism", 0.0, determinism},
      {9, "gamma-sweep ordering", 10.0, gamma_sweep},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << " " << c.name << ": "
              << o.detail << " (" << num(secs, 3) << " s"
              << (c.budget_s > 0.0 ? ", budget " + num(c.budget_s, 0) + " s" : "")
              << (in_time ? "" : ", over budget") << ")\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
