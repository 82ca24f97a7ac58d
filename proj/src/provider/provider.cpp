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

#include "wkm/provider/provider.hpp"

#include "wkm/common/error.hpp"

namespace wkm {

std::string_view to_string(ProviderRole r) { return r == ProviderRole::kAgent ? "agent" : "wkm"; }

ProviderRole parse_role(std::string_view s) {
  if (s == "agent") return ProviderRole::kAgent;
  if (s == "wkm") return ProviderRole::kWkm;
  throw ConfigError("unknown provider role: " + std::string(s));
}

std::string SerializedProvider::generate(const std::string& prompt, std::size_t max_chars,
                                         double temperature) {
  std::lock_guard lock(mu_);
  return inner_->generate(prompt, max_chars, temperature);
}

std::vector<double> SerializedProvider::score_actions(const std::string& prompt,
                                                      const std::vector<std::string>& actions) {
  std::lock_guard lock(mu_);
  return inner_->score_actions(prompt, actions);
}

Embedding SerializedProvider::embed(const std::string& text) {
  std::lock_guard lock(mu_);
  return inner_->embed(text);
}

std::shared_ptr<Provider> make_shareable(std::shared_ptr<Provider> p) {
  if (p->concurrent()) return p;
  return std::make_shared<SerializedProvider>(std::move(p));
}

}  // namespace wkm
