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

#include "wkm/planner/planner.hpp"

#include <chrono>
#include <cstdio>
#include <map>

#include "wkm/common/error.hpp"
#include "wkm/common/hash.hpp"
#include "wkm/common/parallel.hpp"

namespace wkm {

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(double* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    if (!sink_) return;
    const auto d = std::chrono::steady_clock::now() - start_;
    *sink_ += std::chrono::duration<double, std::milli>(d).count();
  }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

 private:
  double* sink_;
  std::chrono::steady_clock::time_point start_;
};

double* field(PhaseTimings* t, double PhaseTimings::*member) {
  return t ? &(t->*member) : nullptr;
}

Json optional_vector(const std::optional<std::vector<double>>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string_view to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::kFull: return "full";
    case PlannerMode::kNoState: return "no_state";
    case PlannerMode::kNoTask: return "no_task";
    case PlannerMode::kExplicitState: return "explicit_state";
  }
  return "full";
}

PlannerMode parse_planner_mode(std::string_view s) {
  if (s == "full") return PlannerMode::kFull;
  if (s == "no_state") return PlannerMode::kNoState;
  if (s == "no_task") return PlannerMode::kNoTask;
  if (s == "explicit_state") return PlannerMode::kExplicitState;
  throw ConfigError("unknown planner mode: " + std::string(s));
}

bool PlannerConfig::retrieves() const noexcept {
  return mode == PlannerMode::kFull || mode == PlannerMode::kNoTask;
}

bool PlannerConfig::summarizes() const noexcept { return mode != PlannerMode::kNoState; }

double PlannerConfig::effective_gamma() const noexcept {
  return retrieves() ? fusion.gamma : 1.0;
}

void PlannerConfig::validate() const {
  fusion.validate();
  if (retrieval_n) {
    if (*retrieval_n == 0) throw ConfigError("retrieval n must be positive");
    if (!retrieves()) {
      throw ConfigError("retrieval n does not apply to planner mode " +
                        std::string(to_string(mode)));
    }
  }
}

void PlannerContext::validate() const {
  config.validate();
  if (!agent) throw PreconditionError("planner needs an agent provider");
  if (agent->role() != ProviderRole::kAgent) {
    throw PreconditionError("planner agent provider must hold the agent role");
  }
  if (config.summarizes() || config.uses_task_knowledge()) {
    if (!wkm) throw PreconditionError("planner mode needs a knowledge-model provider");
    if (wkm->role() != ProviderRole::kWkm) {
      throw PreconditionError("planner knowledge-model provider must hold the wkm role");
    }
  }
  if (config.retrieves() && !kb) {
    throw PreconditionError("planner mode " + std::string(to_string(config.mode)) +
                            " needs a knowledge base");
  }
}

Decision decide(const PlannerContext& ctx, HistoryWriter& history,
                const std::vector<std::string>& available,
                const std::optional<std::string>& prev_action, const std::string& task_id,
                std::size_t step, PhaseTimings* timings) {
  Decision d;
  if (step > 0 && prev_action && ctx.config.summarizes()) {
    {
      Stopwatch sw(field(timings, &PhaseTimings::state_knowledge_ms));
      d.state_knowledge = generate_state_knowledge(*ctx.wkm, history.text(), ctx.state_template,
                                                   task_id, step - 1, ctx.state_example)
                              .text;
    }
    if (ctx.config.mode == PlannerMode::kExplicitState) {
      history.state_knowledge(*d.state_knowledge);
    }
    if (ctx.config.retrieves()) {
      Stopwatch sw(field(timings, &PhaseTimings::retrieval_ms));
      const Embedding q = embed_text(*ctx.wkm, *d.state_knowledge);
      const RetrievalResult r = knn(*ctx.kb, q, *prev_action, ctx.config.effective_n());
      d.retrieval = RetrievalSummary{r.matched(),
                                     r.neighbors.empty() ? 0.0 : r.neighbors.front().similarity};
      d.p_know = next_action_distribution(r, *ctx.kb, available);
    }
  }
  {
    Stopwatch sw(field(timings, &PhaseTimings::agent_ms));
    const std::string prompt =
        ctx.plan_template.fill({{"example", ctx.plan_example}, {"history", history.text()}});
    d.p_agent = normalize_agent_scores(score_actions(*ctx.agent, prompt, available));
  }
  FusionConfig fc = ctx.config.fusion;
  fc.gamma = ctx.config.effective_gamma();
  d.fusion = fuse_argmax(d.p_agent, ctx.config.retrieves() ? d.p_know : std::nullopt, fc);
  return d;
}

bool EpisodeTrace::hallucinated() const {
  for (const auto& s : steps) {
    if (!s.was_valid) return true;
  }
  return false;
}

EpisodeTrace run_episode(const env::TaskSpec& task, const PlannerContext& ctx) {
  ctx.validate();
  env::ResetResult start = env::reset(task);
  env::WorldState& world = start.state;

  EpisodeTrace trace;
  trace.task = task.instruction;
  trace.mode = ctx.config.mode;
  trace.gamma = ctx.config.effective_gamma();
  if (ctx.config.retrieves()) trace.retrieval_n = ctx.config.effective_n();
  trace.available_actions = start.available_actions;

  HistoryWriter history(task.instruction.text);
  try {
    if (ctx.config.uses_task_knowledge()) {
      Stopwatch sw(&trace.timings.task_knowledge_ms);
      trace.task_knowledge = generate_task_knowledge(*ctx.wkm, task.instruction).text;
      history.task_knowledge(*trace.task_knowledge);
    }
    std::optional<std::string> prev;
    for (std::size_t t = 0; !world.done; ++t) {
      TraceStep ts;
      ts.history_hash = hex64(fnv1a64(history.text()));
      const Decision d = decide(ctx, history, trace.available_actions, prev,
                                task.instruction.id, t, &trace.timings);
      ts.state_knowledge = d.state_knowledge;
      ts.retrieval = d.retrieval;
      ts.p_agent = d.p_agent.probs;
      if (d.p_know) ts.p_know = d.p_know->probs;
      ts.kb_silent = d.fusion.kb_silent;
      ts.fused = d.fusion.fused;
      ts.action = d.fusion.action_id;
      env::StepOutcome out;
      {
        Stopwatch sw(&trace.timings.env_ms);
        out = env::step(world, ActionRecord("", ts.action));
      }
      history.action(ts.action);
      history.observation(out.observation);
      ts.observation = out.observation;
      ts.was_valid = out.was_valid;
      prev = canonical_action_id(ts.action);
      trace.steps.push_back(std::move(ts));
    }
  } catch (const TransportError& e) {
    trace.aborted = true;
    trace.transport_failure = true;
    trace.abort_reason = e.what();
  } catch (const Error& e) {
    trace.aborted = true;
    trace.abort_reason = e.what();
  }
  trace.reward = world.reward;
  return trace;
}

std::vector<Json> trace_lines(const EpisodeTrace& trace) {
  std::vector<Json> lines;
  lines.push_back(Json{
      {"record", "header"},
      {"task_id", trace.task.id},
      {"split", to_string(trace.task.split)},
      {"instruction", trace.task.text},
      {"mode", to_string(trace.mode)},
      {"gamma", trace.gamma},
      {"retrieval_n", trace.retrieval_n ? Json(*trace.retrieval_n) : Json(nullptr)},
      {"task_knowledge", trace.task_knowledge ? Json(*trace.task_knowledge) : Json(nullptr)},
      {"available_actions", trace.available_actions}});
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    Json retrieval = nullptr;
    if (s.retrieval) {
      retrieval = Json{{"matched", s.retrieval->matched},
                       {"top_similarity", s.retrieval->top_similarity}};
    }
    lines.push_back(Json{
        {"record", "step"},
        {"t", i},
        {"history_hash", s.history_hash},
        {"state_knowledge", s.state_knowledge ? Json(*s.state_knowledge) : Json(nullptr)},
        {"retrieval", std::move(retrieval)},
        {"p_agent", s.p_agent},
        {"p_know", optional_vector(s.p_know)},
        {"kb_silent", s.kb_silent},
        {"fused", s.fused},
        {"action", s.action},
        {"observation", s.observation},
        {"was_valid", s.was_valid}});
  }
  Json footer{{"record", "footer"},
              {"task_id", trace.task.id},
              {"reward", trace.reward},
              {"steps", trace.steps.size()},
              {"aborted", trace.aborted}};
  if (trace.aborted) footer["error"] = trace.abort_reason;
  lines.push_back(std::move(footer));
  return lines;
}

void write_traces(const std::filesystem::path& path, const std::vector<EpisodeTrace>& traces) {
  std::vector<Json> rows;
  for (const auto& t : traces) {
    auto lines = trace_lines(t);
    rows.insert(rows.end(), std::make_move_iterator(lines.begin()),
                std::make_move_iterator(lines.end()));
  }
  write_jsonl(path, rows);
}

Json timings_json(const EpisodeTrace& trace) {
  const PhaseTimings& t = trace.timings;
  return Json{{"task_id", trace.task.id},
              {"task_knowledge_ms", t.task_knowledge_ms},
              {"state_knowledge_ms", t.state_knowledge_ms},
              {"retrieval_ms", t.retrieval_ms},
              {"agent_ms", t.agent_ms},
              {"env_ms", t.env_ms}};
}

Json to_json(const MetricsReport& m) {
  Json per_task = Json::array();
  for (const auto& t : m.per_task) {
    per_task.push_back(Json{{"task_id", t.task_id},
                            {"reward", t.reward},
                            {"steps", t.steps},
                            {"hallucinated", t.hallucinated},
                            {"aborted", t.aborted}});
  }
  return Json{{"avg_reward", m.avg_reward},
              {"avg_steps", m.avg_steps},
              {"hallucinatory_rate", m.hallucinatory_rate},
              {"n_tasks", m.n_tasks},
              {"per_task", std::move(per_task)}};
}

MetricsReport summarize_traces(const std::vector<EpisodeTrace>& traces) {
  MetricsReport m;
  m.n_tasks = traces.size();
  if (traces.empty()) return m;
  double reward = 0.0;
  double steps = 0.0;
  std::size_t hallucinated = 0;
  for (const auto& t : traces) {
    TaskOutcome o;
    o.task_id = t.task.id;
    o.aborted = t.aborted;
    o.reward = t.aborted ? 0.0 : t.reward;
    o.steps = t.steps.size();
    o.hallucinated = t.hallucinated();
    reward += o.reward;
    steps += static_cast<double>(o.steps);
    hallucinated += o.hallucinated ? 1 : 0;
    m.per_task.push_back(std::move(o));
  }
  const double n = static_cast<double>(traces.size());
  m.avg_reward = reward / n;
  m.avg_steps = steps / n;
  m.hallucinatory_rate = static_cast<double>(hallucinated) / n;
  return m;
}

Evaluation evaluate(const std::vector<const env::TaskSpec*>& tasks, const PlannerContext& ctx,
                    std::size_t jobs) {
  if (tasks.empty()) throw PreconditionError("evaluate: no tasks");
  ctx.validate();
  Evaluation out;
  out.traces.resize(tasks.size());
  parallel_for(tasks.size(), jobs,
               [&](std::size_t i) { out.traces[i] = run_episode(*tasks[i], ctx); });
  out.metrics = summarize_traces(out.traces);
  return out;
}

std::vector<SweepRow> sweep_gamma(const std::vector<double>& gammas,
                                  const std::vector<const env::TaskSpec*>& tasks,
                                  const PlannerContext& ctx, std::size_t jobs) {
  if (gammas.empty()) throw PreconditionError("sweep_gamma: no gamma values");
  std::vector<SweepRow> rows;
  for (double g : gammas) {
    PlannerContext c = ctx;
    c.config.mode = PlannerMode::kFull;
    c.config.fusion.gamma = g;
    rows.push_back(SweepRow{g, evaluate(tasks, c, jobs).metrics});
  }
  return rows;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

double win_rate(const MetricsReport& a, const MetricsReport& b) {
  std::map<std::string, std::size_t> steps_b;
  for (const auto& t : b.per_task) steps_b.emplace(t.task_id, t.steps);
  double wins = 0.0;
  std::size_t shared = 0;
  for (const auto& t : a.per_task) {
    const auto it = steps_b.find(t.task_id);
    if (it == steps_b.end()) continue;
    ++shared;
    if (t.steps < it->second) {
      wins += 1.0;
    } else if (t.steps == it->second) {
      wins += 0.5;
    }
  }
  if (shared == 0) throw PreconditionError("win_rate: reports share no task");
  return wins / static_cast<double>(shared);
}

}  // namespace wkm
