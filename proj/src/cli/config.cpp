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

#include "wkm/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "wkm/common/error.hpp"
#include "wkm/common/hash.hpp"
#include "wkm/fusion/fusion.hpp"

namespace wkm::cli {
namespace {

namespace fs = std::filesystem;

void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a table");
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key " + where + "." + k);
  }
}

const Json& section(const Json& doc, const std::string& key) {
  static const Json kEmpty = Json::object();
  if (!doc.contains(key)) return kEmpty;
  return doc.at(key);
}

template <typename T>
T get(const Json& obj, const std::string& where, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::uint64_t get_count(const Json& obj, const std::string& where, const std::string& key,
                        std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double get_gamma(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  const double g = v.get<double>();
  if (!(g >= 0.0 && g <= 1.0)) throw ConfigError(where + " must lie in [0, 1]");
  return g;
}

std::vector<double> gamma_list(const Json& obj, const std::string& where, const std::string& key,
                               std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + " must be a non-empty list");
  std::vector<double> out;
  for (const auto& g : v) out.push_back(get_gamma(g, where + "." + key));
  return out;
}

Split split_value(const std::string& s, const std::string& where) {
  try {
    return parse_split(s);
  } catch (const FormatError&) {
    throw ConfigError(where + ": unknown split " + s);
  }
}

fs::path existing_path(const fs::path& base, const std::string& raw, const std::string& where) {
  const fs::path p = fs::path(raw).is_absolute() ? fs::path(raw) : base / raw;
  if (!fs::exists(p)) throw ConfigError(where + " refers to missing path " + p.string());
  return p;
}

ProviderBinding parse_binding(const Json& obj, const std::string& where, const fs::path& base,
                              Json& canonical) {
  check_keys(obj, where, {"scripted", "remote"});
  ProviderBinding b;
  const bool has_scripted = obj.contains("scripted");
  const bool has_remote = obj.contains("remote");
  if (has_scripted == has_remote) {
    throw ConfigError(where + " must name exactly one source: scripted or remote");
  }
  if (has_scripted) {
    const Json& s = obj.at("scripted");
    const std::string w = where + ".scripted";
    check_keys(s, w, {"tables", "oracle_plans", "seed"});
    ScriptedSource src;
    if (s.contains("tables")) {
      src.tables = existing_path(base, get<std::string>(s, w, "tables", ""), w + ".tables");
    }
    src.oracle_plans = get<bool>(s, w, "oracle_plans", false);
    src.seed = get_count(s, w, "seed", 0);
    canonical = Json{{"scripted",
                      {{"tables", s.contains("tables") ? s.at("tables") : Json(nullptr)},
                       {"oracle_plans", src.oracle_plans},
                       {"seed", src.seed}}}};
    b.scripted = std::move(src);
  } else {
    const Json& r = obj.at("remote");
    const std::string w = where + ".remote";
    check_keys(r, w, {"url", "timeout_seconds", "concurrent"});
    RemoteSource src;
    src.url = get<std::string>(r, w, "url", "");
    if (src.url.empty()) throw ConfigError(w + ".url is required");
    src.timeout_seconds = get<int>(r, w, "timeout_seconds", 60);
    if (src.timeout_seconds <= 0) throw ConfigError(w + ".timeout_seconds must be positive");
    src.concurrent = get<bool>(r, w, "concurrent", false);
    canonical = Json{{"remote",
                      {{"url", src.url},
                       {"timeout_seconds", src.timeout_seconds},
                       {"concurrent", src.concurrent}}}};
    b.remote = std::move(src);
  }
  return b;
}

}  // namespace

std::string RunConfig::hash() const { return sha256_hex(canonical.dump()); }

fs::path RunConfig::resolve(const fs::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

Json read_config_document(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  if (path.extension() == ".toml") {
    try {
      const toml::table tbl = toml::parse_file(path.string());
      std::ostringstream os;
      os << toml::json_formatter{tbl};
      return Json::parse(os.str());
    } catch (const toml::parse_error& e) {
      std::ostringstream os;
      os << "config " << path.string() << ": " << e.description() << " at " << e.source().begin;
      throw ConfigError(os.str());
    }
  }
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

RunConfig parse_config(const Json& doc, const fs::path& base_dir, const Overrides& overrides) {
  check_keys(doc, "config", {"env", "provider", "pipeline", "planner", "eval"});
  RunConfig c;
  c.base_dir = base_dir;

  const Json& e = section(doc, "env");
  check_keys(e, "env",
             {"kind", "seed", "max_steps", "reward_mode", "n_train", "n_seen", "n_unseen"});
  EnvKind kind;
  try {
    kind = parse_env_kind(get<std::string>(e, "env", "kind", "household"));
  } catch (const FormatError& err) {
    throw ConfigError(std::string("env.kind: ") + err.what());
  }
  const std::uint64_t seed = overrides.seed.value_or(get_count(e, "env", "seed", 0));
  c.env = env::EnvConfig::defaults(kind, seed);
  c.env.max_steps = get<int>(e, "env", "max_steps", c.env.max_steps);
  if (e.contains("reward_mode")) {
    try {
      c.env.reward_mode = env::parse_reward_mode(get<std::string>(e, "env", "reward_mode", ""));
    } catch (const FormatError& err) {
      throw ConfigError(std::string("env.reward_mode: ") + err.what());
    }
  }
  c.env.validate();
  c.sizes.n_train = get_count(e, "env", "n_train", 50);
  c.sizes.n_seen = get_count(e, "env", "n_seen", 10);
  c.sizes.n_unseen = get_count(e, "env", "n_unseen", 10);
  if (c.sizes.n_train == 0 || c.sizes.n_seen == 0 || c.sizes.n_unseen == 0) {
    throw ConfigError("env split sizes must be positive");
  }

  const Json& p = section(doc, "provider");
  check_keys(p, "provider", {"agent", "wkm"});
  if (!p.contains("agent") || !p.contains("wkm")) {
    throw ConfigError("provider.agent and provider.wkm are both required");
  }
  Json agent_json;
  Json wkm_json;
  c.agent = parse_binding(p.at("agent"), "provider.agent", base_dir, agent_json);
  c.wkm = parse_binding(p.at("wkm"), "provider.wkm", base_dir, wkm_json);
  if (c.wkm.scripted && c.wkm.scripted->oracle_plans) {
    throw ConfigError("provider.wkm.scripted.oracle_plans applies to the agent only");
  }

  const Json& pl = section(doc, "pipeline");
  check_keys(pl, "pipeline", {"templates", "examples", "output_dir", "chosen_only"});
  const Json raw_templates = pl.contains("templates") ? pl.at("templates") : Json(nullptr);
  const Json raw_examples = pl.contains("examples") ? pl.at("examples") : Json(nullptr);
  if (pl.contains("templates")) {
    c.templates_dir = existing_path(base_dir, get<std::string>(pl, "pipeline", "templates", ""),
                                    "pipeline.templates");
  }
  if (pl.contains("examples")) {
    c.examples_dir = existing_path(base_dir, get<std::string>(pl, "pipeline", "examples", ""),
                                   "pipeline.examples");
  }
  c.output_dir = get<std::string>(pl, "pipeline", "output_dir", "wkm-out");
  if (c.output_dir.empty()) throw ConfigError("pipeline.output_dir must not be empty");
  c.chosen_only = get<bool>(pl, "pipeline", "chosen_only", false);

  const Json& pn = section(doc, "planner");
  check_keys(pn, "planner", {"mode", "gamma", "retrieval_n", "split"});
  c.planner.mode = parse_planner_mode(
      overrides.mode.value_or(get<std::string>(pn, "planner", "mode", "full")));
  c.planner.fusion.gamma = pn.contains("gamma") ? get_gamma(pn.at("gamma"), "planner.gamma")
                                                : default_gamma(kind);
  if (overrides.gamma) c.planner.fusion.gamma = get_gamma(Json(*overrides.gamma), "--gamma");
  if (pn.contains("retrieval_n")) {
    const std::uint64_t n = get_count(pn, "planner", "retrieval_n", 0);
    if (n == 0) throw ConfigError("planner.retrieval_n must be positive");
    c.planner.retrieval_n = static_cast<std::size_t>(n);
  }
  c.planner.validate();
  c.plan_split = split_value(
      overrides.split.value_or(get<std::string>(pn, "planner", "split", "test-seen")),
      "planner.split");

  const Json& ev = section(doc, "eval");
  check_keys(ev, "eval", {"splits", "gammas", "sweep"});
  if (overrides.split) {
    c.eval_splits = {c.plan_split};
  } else if (ev.contains("splits")) {
    const Json& s = ev.at("splits");
    if (!s.is_array() || s.empty()) throw ConfigError("eval.splits must be a non-empty list");
    for (const auto& v : s) {
      if (!v.is_string()) throw ConfigError("eval.splits entries must be strings");
      c.eval_splits.push_back(split_value(v.get<std::string>(), "eval.splits"));
    }
  } else {
    c.eval_splits = {Split::kTestSeen, Split::kTestUnseen};
  }
  c.eval_gammas = overrides.gamma ? std::vector<double>{c.planner.fusion.gamma}
                                  : gamma_list(ev, "eval", "gammas", {c.planner.fusion.gamma});
  c.sweep_gammas = gamma_list(ev, "eval", "sweep", {0.0, 0.25, 0.5, 0.75, 1.0});

  Json splits = Json::array();
  for (Split s : c.eval_splits) splits.push_back(to_string(s));
  c.canonical = Json{
      {"env",
       {{"kind", to_string(c.env.kind)},
        {"seed", c.env.seed},
        {"max_steps", c.env.max_steps},
        {"reward_mode", env::to_string(c.env.reward_mode)},
        {"n_train", c.sizes.n_train},
        {"n_seen", c.sizes.n_seen},
        {"n_unseen", c.sizes.n_unseen}}},
      {"provider", {{"agent", agent_json}, {"wkm", wkm_json}}},
      {"pipeline",
       {{"templates", raw_templates},
        {"examples", raw_examples},
        {"output_dir", c.output_dir.string()},
        {"chosen_only", c.chosen_only}}},
      {"planner",
       {{"mode", to_string(c.planner.mode)},
        {"gamma", c.planner.fusion.gamma},
        {"retrieval_n",
         c.planner.retrieval_n ? Json(*c.planner.retrieval_n) : Json(nullptr)},
        {"split", to_string(c.plan_split)}}},
      {"eval", {{"splits", splits}, {"gammas", c.eval_gammas}, {"sweep", c.sweep_gammas}}}};
  return c;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  const Json doc = read_config_document(path);
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(doc, base, overrides);
}

}  // namespace wkm::cli
