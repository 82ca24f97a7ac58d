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

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkm/common/json.hpp"
#include "wkm/fusion/distribution.hpp"
#include "wkm/provider/provider.hpp"

namespace wkm {

// (a_pre, s, a_next) triplet with the state text's embedding.
struct KBRecord {
  std::string state_text;
  Embedding state_embedding;
  std::string prev_action;  // canonical id
  std::string next_action;  // canonical id
  std::string task_id;
  std::size_t step_index = 0;

  friend bool operator==(const KBRecord&, const KBRecord&) = default;
};

Json to_json(const KBRecord& r);
KBRecord kb_record_from_json(const Json& j);

void write_kb(const std::filesystem::path& path, const std::vector<KBRecord>& records);

// dot(a, b) / (|a| |b|), clamped to [-1, 1]; 0 when either norm is 0.
// Throws DimensionMismatch for unequal sizes.
double cosine(const Embedding& a, const Embedding& b);

// Immutable index over KB records, bucketed by previous action.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  // Canonicalizes action ids. Throws DimensionMismatch when embeddings
  // disagree in size, naming the offending record position.
  explicit KnowledgeBase(std::vector<KBRecord> records);

  // Empty files give an empty base. Errors name the 1-based line.
  static KnowledgeBase load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return records_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<KBRecord>& records() const noexcept { return records_; }
  const std::vector<double>& norms() const noexcept { return norms_; }
  // Record positions with this previous action, ascending; empty when none.
  const std::vector<std::size_t>& bucket(std::string_view prev_action) const;
  const std::map<std::string, std::vector<std::size_t>, std::less<>>& index() const noexcept {
    return index_;
  }

 private:
  std::vector<KBRecord> records_;
  std::vector<double> norms_;
  std::size_t dimension_ = 0;
  std::map<std::string, std::vector<std::size_t>, std::less<>> index_;
};

struct Neighbor {
  std::size_t position = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct RetrievalResult {
  std::vector<Neighbor> neighbors;  // similarity descending, position ascending on ties
  std::size_t requested = 0;

  std::size_t matched() const noexcept { return neighbors.size(); }
};

inline constexpr std::size_t kDefaultRetrievalN = 3000;

// Exact scan over the prev_action bucket; returns min(n, bucket size)
// neighbors. An empty KB answers with no neighbors for any query.
RetrievalResult knn(const KnowledgeBase& kb, const Embedding& query, std::string_view prev_action,
                    std::size_t n);

// p(a_i) = N_i / N_eff over `available`, where retrieved next actions outside
// `available` are discarded first. nullopt when nothing usable was retrieved.
std::optional<ActionDistribution> next_action_distribution(
    const RetrievalResult& result, const KnowledgeBase& kb,
    const std::vector<std::string>& available);

}  // namespace wkm
