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
#include <optional>
#include <string>

#include "wkm/provider/provider.hpp"

namespace httplib {
class Client;
}

namespace wkm {

struct RemoteConfig {
  std::string url;  // "http://host:port"
  ProviderRole role = ProviderRole::kAgent;
  std::optional<std::string> bearer_token;
  int timeout_seconds = 60;
  // Whether the server tolerates concurrent requests.
  bool concurrent = false;
};

// Client for the HTTP/JSON provider protocol:
//   POST /v1/generate       {role, prompt, max_chars, temperature} -> {text}
//   POST /v1/score_actions  {prompt, actions}                      -> {scores}
//   POST /v1/embed          {text}                                 -> {vector}
// Connection failures, non-2xx statuses and malformed bodies raise
// TransportError. The embedding dimension is pinned by the first answer;
// a later answer of another size raises DimensionMismatch.
class RemoteProvider final : public Provider {
 public:
  explicit RemoteProvider(RemoteConfig config);
  ~RemoteProvider() override;

  ProviderRole role() const override { return config_.role; }
  bool concurrent() const override { return config_.concurrent; }

  std::string generate(const std::string& prompt, std::size_t max_chars,
                       double temperature) override;
  std::vector<double> score_actions(const std::string& prompt,
                                    const std::vector<std::string>& actions) override;
  Embedding embed(const std::string& text) override;

 private:
  struct Impl;
  RemoteConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wkm
