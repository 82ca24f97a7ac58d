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

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace wkm {

enum class ProviderRole { kAgent, kWkm };

std::string_view to_string(ProviderRole r);
ProviderRole parse_role(std::string_view s);

inline constexpr double kWkmTemperature = 0.0;
inline constexpr double kExploreTemperature = 0.0;
inline constexpr double kPlanTemperature = 0.5;

using Embedding = std::vector<double>;

// One raw score per requested action, aligned by index.
struct ActionScores {
  std::vector<std::string> action_ids;
  std::vector<double> scores;
};

// A language model bound to one role. Implementations either tolerate
// concurrent calls or report concurrent() == false, in which case callers
// wrap them in SerializedProvider.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual ProviderRole role() const = 0;
  virtual bool concurrent() const { return true; }

  virtual std::string generate(const std::string& prompt, std::size_t max_chars,
                               double temperature) = 0;
  virtual std::vector<double> score_actions(const std::string& prompt,
                                            const std::vector<std::string>& actions) = 0;
  virtual Embedding embed(const std::string& text) = 0;
};

// Serializes every call to an inner provider.
class SerializedProvider final : public Provider {
 public:
  explicit SerializedProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}

  ProviderRole role() const override { return inner_->role(); }
  bool concurrent() const override { return true; }

  std::string generate(const std::string& prompt, std::size_t max_chars,
                       double temperature) override;
  std::vector<double> score_actions(const std::string& prompt,
                                    const std::vector<std::string>& actions) override;
  Embedding embed(const std::string& text) override;

 private:
  std::shared_ptr<Provider> inner_;
  std::mutex mu_;
};

// Returns `p` itself when it is concurrency-safe, otherwise a serializing
// wrapper around it.
std::shared_ptr<Provider> make_shareable(std::shared_ptr<Provider> p);

}  // namespace wkm
