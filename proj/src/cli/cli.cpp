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

#include "wkm/cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "wkm/common/error.hpp"
#include "wkm/common/hash.hpp"
#include "wkm/common/parallel.hpp"
#include "wkm/env/suite.hpp"
#include "wkm/kb/knowledge_base.hpp"
#include "wkm/pipeline/pipeline.hpp"
#include "wkm/planner/planner.hpp"
#include "wkm/provider/remote.hpp"
#include "wkm/provider/scripted.hpp"
#include "wkm/provider/templates.hpp"

namespace wkm::cli {
namespace {

namespace fs = std::filesystem;

struct Layout {
  fs::path root;

  fs::path suite() const { return root / "suite" / "suite.json"; }
  fs::path experts() const { return root / "suite" / "experts.jsonl"; }
  fs::path explored() const { return root / "explore" / "explored.jsonl"; }
  fs::path knowledge() const { return root / "synthesize" / "task_knowledge.jsonl"; }
  fs::path annotated() const { return root / "synthesize" / "annotated.jsonl"; }
  fs::path kb() const { return root / "kb" / "kb.jsonl"; }
};

struct Ctx {
  const RunConfig& cfg;
  Layout layout;
  std::size_t jobs;
  std::ostream& out;
};

std::string file_key(const fs::path& p, const fs::path& root) {
  const fs::path rel = p.lexically_relative(root);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

Json hash_files(const std::vector<fs::path>& files, const fs::path& root) {
  Json out = Json::object();
  for (const auto& f : files) {
    if (!fs::exists(f)) throw MissingInputError("missing stage input: " + f.string());
    out[file_key(f, root)] = sha256_hex(read_text_file(f));
  }
  return out;
}

// Files outside the output tree whose content shapes a stage's results.
std::vector<fs::path> config_inputs(const RunConfig& cfg) {
  std::vector<fs::path> files;
  for (const ProviderBinding* b : {&cfg.agent, &cfg.wkm}) {
    if (b->scripted && b->scripted->tables) files.push_back(*b->scripted->tables);
  }
  for (const auto& dir : {cfg.templates_dir, cfg.examples_dir}) {
    if (!dir) continue;
    for (TemplateName n : {TemplateName::kTaskKnow, TemplateName::kStateKnow, TemplateName::kPlan}) {
      const fs::path f = *dir / (std::string(to_string(n)) + ".txt");
      if (fs::exists(f)) files.push_back(f);
    }
  }
  return files;
}

struct StageSpec {
  std::string name;
  fs::path dir;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

bool up_to_date(const Ctx& c, const StageSpec& s, const Json& input_hashes) {
  const fs::path mf = s.dir / "manifest.json";
  if (!fs::exists(mf)) return false;
  Json m;
  try {
    m = read_json_file(mf);
  } catch (const Error&) {
    return false;
  }
  if (m.value("config_hash", std::string{}) != c.cfg.hash()) return false;
  if (m.value("inputs", Json::object()) != input_hashes) return false;
  const Json outputs = m.value("outputs", Json::object());
  if (outputs.size() != s.outputs.size()) return false;
  for (const auto& f : s.outputs) {
    const std::string key = file_key(f, c.layout.root);
    if (!fs::exists(f) || !outputs.contains(key)) return false;
    if (outputs.at(key) != sha256_hex(read_text_file(f))) return false;
  }
  return true;
}

// Runs `body` unless the stage's manifest shows it already ran on the same
// config and inputs. `body` returns false after transport failures.
int staged(const Ctx& c, StageSpec spec, const std::function<bool()>& body) {
  for (auto& f : config_inputs(c.cfg)) spec.inputs.push_back(f);
  const Json inputs = hash_files(spec.inputs, c.layout.root);
  if (up_to_date(c, spec, inputs)) {
    c.out << spec.name << ": up to date\n";
    return kExitOk;
  }
  if (!body()) {
    c.out << spec.name << ": finished with provider transport failures\n";
    return kExitTransport;
  }
  const Json manifest{{"stage", spec.name},
                      {"config_hash", c.cfg.hash()},
                      {"config", c.cfg.canonical},
                      {"inputs", inputs},
                      {"outputs", hash_files(spec.outputs, c.layout.root)}};
  write_json_file(spec.dir / "manifest.json", manifest);
  c.out << spec.name << ": done\n";
  return kExitOk;
}

void require(const fs::path& p, std::string_view producer) {
  if (!fs::exists(p)) {
    throw MissingInputError("missing stage input " + p.string() + "; run " +
                            std::string(producer) + " first");
  }
}

env::TaskSuite load_suite(const Ctx& c) {
  require(c.layout.suite(), "gen-suite");
  env::TaskSuite suite = env::load_suite_manifest(c.layout.suite());
  const env::EnvConfig& e = suite.config;
  const env::EnvConfig& want = c.cfg.env;
  if (e.kind != want.kind || e.seed != want.seed || e.max_steps != want.max_steps ||
      e.reward_mode != want.reward_mode || suite.sizes.n_train != c.cfg.sizes.n_train ||
      suite.sizes.n_seen != c.cfg.sizes.n_seen || suite.sizes.n_unseen != c.cfg.sizes.n_unseen) {
    throw MissingInputError("suite in " + c.layout.suite().string() +
                            " was generated for another env block; run gen-suite again");
  }
  return suite;
}

std::shared_ptr<Provider> make_provider(const ProviderBinding& b, ProviderRole role,
                                        const env::TaskSuite* suite) {
  if (b.remote) {
    RemoteConfig rc;
    rc.url = b.remote->url;
    rc.role = role;
    rc.timeout_seconds = b.remote->timeout_seconds;
    rc.concurrent = b.remote->concurrent;
    if (const char* token = std::getenv("WKM_REMOTE_TOKEN"); token && *token) {
      rc.bearer_token = token;
    }
    return make_shareable(std::make_shared<RemoteProvider>(std::move(rc)));
  }
  ScriptedConfig sc;
  if (b.scripted->tables) sc = ScriptedConfig::from_json(read_json_file(*b.scripted->tables));
  sc.role = role;
  sc.seed = b.scripted->seed;
  if (b.scripted->oracle_plans) {
    if (suite == nullptr) throw PreconditionError("oracle plans need the suite");
    for (const auto& t : suite->tasks) {
      sc.plans.try_emplace(t.instruction.text, ScriptedPlan{t.oracle_plan, t.oracle_rationales});
    }
  }
  return std::make_shared<ScriptedProvider>(std::move(sc));
}

bool needs_suite(const ProviderBinding& b) { return b.scripted && b.scripted->oracle_plans; }

struct Prompts {
  std::map<TemplateName, PromptTemplate> templates;
  std::map<TemplateName, std::string> examples;

  const PromptTemplate& tpl(TemplateName n) const { return templates.at(n); }
  const std::string& example(TemplateName n) const { return examples.at(n); }
};

Prompts load_prompts(const RunConfig& cfg) {
  Prompts p{load_templates(cfg.templates_dir.value_or(fs::path{})), {}};
  for (TemplateName n : {TemplateName::kTaskKnow, TemplateName::kStateKnow, TemplateName::kPlan}) {
    std::string text(builtin_example(n));
    if (cfg.examples_dir) {
      const fs::path f = *cfg.examples_dir / (std::string(to_string(n)) + ".txt");
      if (fs::exists(f)) text = read_text_file(f);
    }
    p.examples[n] = std::move(text);
  }
  return p;
}

Json reports_json(const std::vector<StageReport>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string gamma_text(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

std::string csv_header() { return "split,gamma,mode,avg_reward,avg_steps,halluc_rate\n"; }

std::string csv_row(Split split, double gamma, PlannerMode mode, const MetricsReport& m) {
  return std::string(to_string(split)) + "," + gamma_text(gamma) + "," +
         std::string(to_string(mode)) + "," + fixed(m.avg_reward, 4) + "," +
         fixed(m.avg_steps, 2) + "," + fixed(m.hallucinatory_rate, 4) + "\n";
}

void print_metrics(std::ostream& out, Split split, double gamma, PlannerMode mode,
                   const MetricsReport& m) {
  out << "  " << to_string(split) << " gamma=" << gamma_text(gamma) << " mode=" << to_string(mode)
      << " reward=" << fixed(m.avg_reward, 4) << " steps=" << fixed(m.avg_steps, 2)
      << " hallucinatory=" << format_percent(m.hallucinatory_rate) << "\n";
}

bool any_transport(const std::vector<EpisodeTrace>& traces) {
  return std::any_of(traces.begin(), traces.end(),
                     [](const EpisodeTrace& t) { return t.transport_failure; });
}

// Providers, KB and prompts for the planning stages.
struct PlanningSetup {
  std::shared_ptr<Provider> agent;
  std::shared_ptr<Provider> wkm;
  KnowledgeBase kb;
  Prompts prompts;

  PlannerContext context(const PlannerConfig& config) const {
    PlannerContext ctx;
    ctx.agent = agent.get();
    ctx.wkm = wkm.get();
    ctx.kb = config.retrieves() ? &kb : nullptr;
    ctx.config = config;
    ctx.plan_template = prompts.tpl(TemplateName::kPlan);
    ctx.state_template = prompts.tpl(TemplateName::kStateKnow);
    ctx.plan_example = prompts.example(TemplateName::kPlan);
    ctx.state_example = prompts.example(TemplateName::kStateKnow);
    ctx.validate();
    return ctx;
  }
};

PlanningSetup planning_setup(const Ctx& c, const env::TaskSuite& suite, bool need_kb) {
  PlanningSetup s{make_provider(c.cfg.agent, ProviderRole::kAgent, &suite),
                  make_provider(c.cfg.wkm, ProviderRole::kWkm, &suite), KnowledgeBase{},
                  load_prompts(c.cfg)};
  if (need_kb) s.kb = KnowledgeBase::load(c.layout.kb());
  return s;
}

int gen_suite(const Ctx& c) {
  const fs::path dir = c.layout.root / "suite";
  return staged(c, {"gen-suite", dir, {}, {c.layout.suite(), c.layout.experts()}}, [&] {
    env::TaskSuite suite;
    try {
      suite = env::generate_suite(c.cfg.env, c.cfg.sizes);
    } catch (const RangeError& e) {
      throw ConfigError(e.what());
    }
    std::vector<Trajectory> experts;
    for (const auto* t : suite.split(Split::kTrain)) experts.push_back(env::expert_trajectory(*t));
    env::write_suite_manifest(c.layout.suite(), suite);
    write_trajectories(c.layout.experts(), experts);
    c.out << "  " << suite.tasks.size() << " tasks, " << experts.size() << " expert trajectories\n";
    return true;
  });
}

int explore(const Ctx& c) {
  require(c.layout.suite(), "gen-suite");
  const fs::path dir = c.layout.root / "explore";
  const fs::path report = dir / "report.json";
  return staged(c, {"explore", dir, {c.layout.suite()}, {c.layout.explored(), report}}, [&] {
    const env::TaskSuite suite = load_suite(c);
    auto agent = make_provider(c.cfg.agent, ProviderRole::kAgent, &suite);
    const Prompts prompts = load_prompts(c.cfg);
    ExploreResult res =
        collect_explored(suite.split(Split::kTrain), *agent, prompts.tpl(TemplateName::kPlan),
                         prompts.example(TemplateName::kPlan), c.jobs);
    write_trajectories(c.layout.explored(), res.trajectories);
    double total = 0.0;
    for (const auto& t : res.trajectories) total += t.reward;
    const double mean = res.trajectories.empty() ? 0.0 : total / res.trajectories.size();
    write_json_file(report, Json{{"n_tasks", suite.split(Split::kTrain).size()},
                                 {"n_explored", res.trajectories.size()},
                                 {"mean_reward", mean},
                                 {"failures", reports_json(res.failures)}});
    c.out << "  " << res.trajectories.size() << " explored, mean reward " << fixed(mean, 4)
          << ", " << res.failures.size() << " failed\n";
    return std::none_of(res.failures.begin(), res.failures.end(),
                        [](const StageReport& r) { return r.transport; });
  });
}

int synthesize(const Ctx& c) {
  require(c.layout.experts(), "gen-suite");
  require(c.layout.explored(), "explore");
  const fs::path dir = c.layout.root / "synthesize";
  const fs::path report = dir / "report.json";
  std::vector<fs::path> inputs{c.layout.experts(), c.layout.explored()};
  if (needs_suite(c.cfg.agent)) inputs.push_back(c.layout.suite());
  return staged(
      c, {"synthesize", dir, inputs, {c.layout.knowledge(), c.layout.annotated(), report}}, [&] {
        std::optional<env::TaskSuite> suite;
        if (needs_suite(c.cfg.agent)) suite = load_suite(c);
        auto agent = make_provider(c.cfg.agent, ProviderRole::kAgent, suite ? &*suite : nullptr);
        const Prompts prompts = load_prompts(c.cfg);
        const auto experts = read_trajectories(c.layout.experts());
        const auto explored = read_trajectories(c.layout.explored());
        const PairingResult paired = pair_preferences(experts, explored);
        if (paired.pairs.empty()) {
          throw MissingInputError("no preference pairs: explored trajectories match no expert");
        }
        const SynthesisResult syn = synthesize_all_task_knowledge(
            paired.pairs, *agent, prompts.tpl(TemplateName::kTaskKnow),
            prompts.example(TemplateName::kTaskKnow), c.cfg.chosen_only, c.jobs);

        std::vector<const Trajectory*> covered;
        for (const auto& e : experts) {
          if (syn.knowledge.count(e.task.id)) covered.push_back(&e);
        }
        std::vector<SummaryResult> summaries(covered.size());
        std::mutex warn_mu;
        std::vector<std::string> warnings;
        const WarningSink warn = [&](const std::string& m) {
          log_warning(m);
          std::lock_guard<std::mutex> lock(warn_mu);
          warnings.push_back(m);
        };
        parallel_for(covered.size(), c.jobs, [&](std::size_t i) {
          const Trajectory& e = *covered[i];
          summaries[i] = summarize_states(e, *agent, prompts.tpl(TemplateName::kStateKnow),
                                          syn.knowledge.at(e.task.id).knowledge,
                                          prompts.example(TemplateName::kStateKnow), warn);
        });

        std::vector<Json> knowledge_rows;
        for (const auto& [id, k] : syn.knowledge) {
          knowledge_rows.push_back(
              Json{{"task_id", id}, {"text", k.knowledge.text}, {"pair_index", k.pair_index}});
        }
        std::vector<Trajectory> annotated;
        std::vector<StageReport> skipped;
        for (std::size_t i = 0; i < covered.size(); ++i) {
          annotated.push_back(wkm::annotate(*covered[i], summaries[i].states));
          skipped.insert(skipped.end(), summaries[i].skipped.begin(), summaries[i].skipped.end());
        }
        write_jsonl(c.layout.knowledge(), knowledge_rows);
        write_trajectories(c.layout.annotated(), annotated);
        Json pair_skips = Json::array();
        for (const auto& s : paired.skipped) {
          pair_skips.push_back(Json{{"task_id", s.task_id}, {"reason", s.reason}});
        }
        std::sort(warnings.begin(), warnings.end());
        write_json_file(report, Json{{"n_pairs", paired.pairs.size()},
                                     {"n_knowledge", syn.knowledge.size()},
                                     {"n_annotated", annotated.size()},
                                     {"unpaired", pair_skips},
                                     {"knowledge_failures", reports_json(syn.failures)},
                                     {"summary_skips", reports_json(skipped)},
                                     {"warnings", warnings}});
        c.out << "  " << syn.knowledge.size() << " task knowledge records, " << annotated.size()
              << " annotated experts, " << skipped.size() << " skipped summaries\n";
        return true;
      });
}

int build_kb(const Ctx& c) {
  require(c.layout.annotated(), "synthesize");
  const fs::path dir = c.layout.root / "kb";
  const fs::path report = dir / "report.json";
  return staged(c, {"build-kb", dir, {c.layout.annotated()}, {c.layout.kb(), report}}, [&] {
    auto wkm = make_provider(c.cfg.wkm, ProviderRole::kWkm, nullptr);
    const auto annotated = read_trajectories(c.layout.annotated());
    std::vector<KbBuildResult> built(annotated.size());
    parallel_for(annotated.size(), c.jobs, [&](std::size_t i) {
      const Trajectory& t = annotated[i];
      std::vector<StateKnowledge> states;
      for (std::size_t k = 0; k < t.steps.size(); ++k) {
        if (t.steps[k].state_knowledge) {
          states.push_back(StateKnowledge{t.task.id, k, *t.steps[k].state_knowledge});
        }
      }
      built[i] = build_kb_records(t, states, *wkm);
    });
    std::vector<KBRecord> records;
    std::vector<StageReport> dropped;
    for (auto& b : built) {
      records.insert(records.end(), b.records.begin(), b.records.end());
      dropped.insert(dropped.end(), b.dropped.begin(), b.dropped.end());
    }
    const KnowledgeBase kb(records);
    write_kb(c.layout.kb(), kb.records());
    write_json_file(report, Json{{"n_records", kb.size()},
                                 {"dimension", kb.dimension()},
                                 {"n_prev_actions", kb.index().size()},
                                 {"dropped", reports_json(dropped)}});
    c.out << "  " << kb.size() << " records over " << kb.index().size() << " previous actions\n";
    return true;
  });
}

int emit_train(const Ctx& c) {
  require(c.layout.annotated(), "synthesize");
  require(c.layout.knowledge(), "synthesize");
  const fs::path dir = c.layout.root / "train";
  const fs::path agent_path = dir / "agent.jsonl";
  const fs::path wkm_path = dir / "wkm.jsonl";
  return staged(c,
                {"emit-train", dir, {c.layout.annotated(), c.layout.knowledge()},
                 {agent_path, wkm_path}},
                [&] {
                  std::map<std::string, TaskKnowledge> knowledge;
                  for_each_jsonl(c.layout.knowledge(), [&](const Json& j, std::size_t) {
                    const auto id = j.at("task_id").get<std::string>();
                    knowledge[id] = TaskKnowledge{id, j.at("text").get<std::string>()};
                  });
                  const TrainingCorpora corpora =
                      emit_training(read_trajectories(c.layout.annotated()), knowledge);
                  std::vector<Json> a;
                  std::vector<Json> w;
                  for (const auto& r : corpora.agent) a.push_back(to_json(r));
                  for (const auto& r : corpora.wkm) w.push_back(to_json(r));
                  write_jsonl(agent_path, a);
                  write_jsonl(wkm_path, w);
                  c.out << "  " << a.size() << " agent records, " << w.size()
                        << " wkm records\n";
                  return true;
                });
}

std::vector<fs::path> planning_inputs(const Ctx& c, bool need_kb) {
  std::vector<fs::path> inputs{c.layout.suite()};
  if (need_kb) inputs.push_back(c.layout.kb());
  return inputs;
}

int plan(const Ctx& c) {
  require(c.layout.suite(), "gen-suite");
  const bool need_kb = c.cfg.planner.retrieves();
  if (need_kb) require(c.layout.kb(), "build-kb");
  const Split split = c.cfg.plan_split;
  const fs::path dir = c.layout.root / "plan" / std::string(to_string(split));
  const fs::path traces_path = dir / "traces.jsonl";
  const fs::path timings_path = dir / "timings.jsonl";
  return staged(c, {"plan", dir, planning_inputs(c, need_kb), {traces_path, timings_path}}, [&] {
    const env::TaskSuite suite = load_suite(c);
    const PlanningSetup setup = planning_setup(c, suite, need_kb);
    const Evaluation ev = evaluate(suite.split(split), setup.context(c.cfg.planner), c.jobs);
    write_traces(traces_path, ev.traces);
    std::vector<Json> timings;
    for (const auto& t : ev.traces) timings.push_back(timings_json(t));
    write_jsonl(timings_path, timings);
    print_metrics(c.out, split, c.cfg.planner.effective_gamma(), c.cfg.planner.mode, ev.metrics);
    return !any_transport(ev.traces);
  });
}

std::string run_label(Split split, double gamma) {
  return std::string(to_string(split)) + "-g" + gamma_text(gamma);
}

int eval(const Ctx& c) {
  require(c.layout.suite(), "gen-suite");
  const bool need_kb = c.cfg.planner.retrieves();
  if (need_kb) require(c.layout.kb(), "build-kb");
  const fs::path dir = c.layout.root / "eval";
  const fs::path metrics_path = dir / "metrics.json";
  const fs::path csv_path = dir / "metrics.csv";
  std::vector<fs::path> outputs{metrics_path, csv_path};
  for (Split s : c.cfg.eval_splits) {
    for (double g : c.cfg.eval_gammas) {
      outputs.push_back(dir / ("traces-" + run_label(s, g) + ".jsonl"));
    }
  }
  return staged(c, {"eval", dir, planning_inputs(c, need_kb), outputs}, [&] {
    const env::TaskSuite suite = load_suite(c);
    const PlanningSetup setup = planning_setup(c, suite, need_kb);
    Json runs = Json::array();
    std::string csv = csv_header();
    bool clean = true;
    for (Split s : c.cfg.eval_splits) {
      for (double g : c.cfg.eval_gammas) {
        PlannerConfig pc = c.cfg.planner;
        pc.fusion.gamma = g;
        const Evaluation ev = evaluate(suite.split(s), setup.context(pc), c.jobs);
        write_traces(dir / ("traces-" + run_label(s, g) + ".jsonl"), ev.traces);
        const double eff = pc.effective_gamma();
        runs.push_back(Json{{"split", to_string(s)},
                            {"gamma", eff},
                            {"mode", to_string(pc.mode)},
                            {"metrics", to_json(ev.metrics)}});
        csv += csv_row(s, eff, pc.mode, ev.metrics);
        print_metrics(c.out, s, eff, pc.mode, ev.metrics);
        clean = clean && !any_transport(ev.traces);
      }
    }
    write_json_file(metrics_path, Json{{"runs", runs}});
    write_text_file(csv_path, csv);
    return clean;
  });
}

int sweep(const Ctx& c) {
  require(c.layout.suite(), "gen-suite");
  require(c.layout.kb(), "build-kb");
  const Split split = c.cfg.plan_split;
  const fs::path dir = c.layout.root / "sweep" / std::string(to_string(split));
  const fs::path csv_path = dir / "sweep.csv";
  const fs::path json_path = dir / "sweep.json";
  return staged(c, {"sweep", dir, planning_inputs(c, true), {csv_path, json_path}}, [&] {
    const env::TaskSuite suite = load_suite(c);
    const PlanningSetup setup = planning_setup(c, suite, true);
    PlannerConfig pc = c.cfg.planner;
    pc.mode = PlannerMode::kFull;
    const auto rows = sweep_gamma(c.cfg.sweep_gammas, suite.split(split), setup.context(pc), c.jobs);
    Json runs = Json::array();
    std::string csv = csv_header();
    for (const auto& r : rows) {
      runs.push_back(Json{{"split", to_string(split)},
                          {"gamma", r.gamma},
                          {"mode", to_string(PlannerMode::kFull)},
                          {"metrics", to_json(r.metrics)}});
      csv += csv_row(split, r.gamma, PlannerMode::kFull, r.metrics);
      print_metrics(c.out, split, r.gamma, PlannerMode::kFull, r.metrics);
    }
    write_json_file(json_path, Json{{"runs", runs}});
    write_text_file(csv_path, csv);
    return true;
  });
}

struct ErrorInfo {
  int code;
  std::string kind;
};

Json error_json(const ErrorInfo& info, const std::string& message) {
  return Json{{"error", info.kind}, {"message", message}, {"exit_code", info.code}};
}

}  // namespace

int run_stage(std::string_view stage, const RunConfig& config, std::size_t jobs,
              std::ostream& out) {
  if (jobs == 0) throw ConfigError("--jobs must be positive");
  const Ctx c{config, Layout{config.resolve(config.output_dir)}, jobs, out};
  if (stage == "gen-suite") return gen_suite(c);
  if (stage == "explore") return explore(c);
  if (stage == "synthesize") return synthesize(c);
  if (stage == "build-kb") return build_kb(c);
  if (stage == "emit-train") return emit_train(c);
  if (stage == "plan") return plan(c);
  if (stage == "eval") return eval(c);
  if (stage == "sweep") return sweep(c);
  throw ConfigError("unknown command: " + std::string(stage));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"World-knowledge-model planner pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::size_t jobs = 1;
  Overrides overrides;
  std::string stage;

  for (std::string_view name : kStageNames) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", config_path, "TOML or JSON run configuration")->required();
    sub->add_option("--jobs", jobs, "parallel episodes or pipeline items");
    sub->add_option("--gamma", overrides.gamma, "fusion weight on the agent");
    sub->add_option("--mode", overrides.mode, "full, no_state, no_task or explicit_state");
    sub->add_option("--split", overrides.split, "train, test-seen or test-unseen");
    sub->add_option("--seed", overrides.seed, "environment seed");
    sub->callback([&stage, name] { stage = std::string(name); });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_json({kExitConfig, "usage"}, e.what()).dump() << "\n";
    return kExitConfig;
  }

  try {
    const RunConfig cfg = load_config(config_path, overrides);
    return run_stage(stage, cfg, jobs, out);
  } catch (const ConfigError& e) {
    err << error_json({kExitConfig, "config"}, e.what()).dump() << "\n";
    return kExitConfig;
  } catch (const MissingInputError& e) {
    err << error_json({kExitMissingInput, "missing_input"}, e.what()).dump() << "\n";
    return kExitMissingInput;
  } catch (const TransportError& e) {
    err << error_json({kExitTransport, "transport"}, e.what()).dump() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    err << error_json({kExitInternal, "internal"}, e.what()).dump() << "\n";
    return kExitInternal;
  }
}

}  // namespace wkm::cli
