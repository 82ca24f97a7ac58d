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

#include "wkm/kb/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wkm/common/error.hpp"
#include "wkm/core/action.hpp"

namespace wkm {

namespace {

double norm(const Embedding& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const Embedding& a, const Embedding& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double similarity(double d, double na, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(d / (na * nb), -1.0, 1.0);
}

}  // namespace

Json to_json(const KBRecord& r) {
  return Json{{"state_text", r.state_text},   {"state_embedding", r.state_embedding},
              {"prev_action", r.prev_action}, {"next_action", r.next_action},
              {"task_id", r.task_id},         {"step_index", r.step_index}};
}

KBRecord kb_record_from_json(const Json& j) {
  KBRecord r;
  r.state_text = j.at("state_text").get<std::string>();
  r.state_embedding = j.at("state_embedding").get<Embedding>();
  r.prev_action = canonical_action_id(j.at("prev_action").get<std::string>());
  r.next_action = canonical_action_id(j.at("next_action").get<std::string>());
  r.task_id = j.at("task_id").get<std::string>();
  r.step_index = j.at("step_index").get<std::size_t>();
  return r;
}

void write_kb(const std::filesystem::path& path, const std::vector<KBRecord>& records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine: dimensions " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  return similarity(dot(a, b), norm(a), norm(b));
}

KnowledgeBase::KnowledgeBase(std::vector<KBRecord> records) : records_(std::move(records)) {
  norms_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    KBRecord& r = records_[i];
    if (i == 0) dimension_ = r.state_embedding.size();
    if (r.state_embedding.size() != dimension_) {
      throw DimensionMismatch("KB record " + std::to_string(i) + " has dimension " +
                              std::to_string(r.state_embedding.size()) + ", expected " +
                              std::to_string(dimension_));
    }
    r.prev_action = canonical_action_id(r.prev_action);
    r.next_action = canonical_action_id(r.next_action);
    norms_.push_back(norm(r.state_embedding));
    index_[r.prev_action].push_back(i);
  }
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::vector<KBRecord> records;
  std::size_t dim = 0;
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    KBRecord r;
    try {
      r = kb_record_from_json(j);
    } catch (const Json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": malformed KB record: " +
                        e.what());
    } catch (const PreconditionError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    if (records.empty()) dim = r.state_embedding.size();
    if (r.state_embedding.size() != dim) {
      throw DimensionMismatch(path.string() + ":" + std::to_string(line) + ": dimension " +
                              std::to_string(r.state_embedding.size()) + ", expected " +
                              std::to_string(dim));
    }
    records.push_back(std::move(r));
  });
  return KnowledgeBase(std::move(records));
}

const std::vector<std::size_t>& KnowledgeBase::bucket(std::string_view prev_action) const {
  static const std::vector<std::size_t> kEmpty;
  const auto it = index_.find(prev_action);
  return it == index_.end() ? kEmpty : it->second;
}

RetrievalResult knn(const KnowledgeBase& kb, const Embedding& query, std::string_view prev_action,
                    std::size_t n) {
  RetrievalResult out;
  out.requested = n;
  if (n == 0) throw PreconditionError("knn: n must be positive");
  if (kb.size() == 0) return out;
  if (query.size() != kb.dimension()) {
    throw DimensionMismatch("knn: query dimension " + std::to_string(query.size()) +
                            ", KB dimension " + std::to_string(kb.dimension()));
  }
  const double qn = norm(query);
  const auto& positions = kb.bucket(prev_action);
  std::vector<Neighbor> all;
  all.reserve(positions.size());
  for (std::size_t pos : positions) {
    all.push_back({pos, similarity(dot(query, kb.records()[pos].state_embedding), qn,
                                   kb.norms()[pos])});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.position < b.position;
  };
  const std::size_t k = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  out.neighbors = std::move(all);
  return out;
}

std::optional<ActionDistribution> next_action_distribution(
    const RetrievalResult& result, const KnowledgeBase& kb,
    const std::vector<std::string>& available) {
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < available.size(); ++i) slot.emplace(available[i], i);
  std::vector<std::size_t> counts(available.size(), 0);
  std::size_t usable = 0;
  for (const auto& nb : result.neighbors) {
    const auto it = slot.find(kb.records()[nb.position].next_action);
    if (it == slot.end()) continue;
    ++counts[it->second];
    ++usable;
  }
  if (usable == 0) return std::nullopt;
  ActionDistribution d;
  d.action_ids = available;
  d.probs.reserve(available.size());
  for (std::size_t c : counts) {
    d.probs.push_back(static_cast<double>(c) / static_cast<double>(usable));
  }
  return d;
}

}  // namespace wkm
