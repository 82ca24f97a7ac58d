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

#include "wkm/provider/remote.hpp"

#include <atomic>
#include <mutex>

#include <httplib.h>

#include "wkm/common/error.hpp"
#include "wkm/common/json.hpp"

namespace wkm {

struct RemoteProvider::Impl {
  std::string url;
  httplib::Headers headers;
  int timeout = 60;
  std::atomic<std::size_t> dimension{0};

  Json post(const std::string& path, const Json& body) {
    // httplib clients are not thread-safe; one per call keeps this object
    // shareable when the server allows concurrency.
    httplib::Client cli(url);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    const auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      throw TransportError("POST " + url + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      throw TransportError("POST " + url + path + " returned HTTP " + std::to_string(res->status));
    }
    try {
      return Json::parse(res->body);
    } catch (const Json::exception& e) {
      throw TransportError("POST " + url + path + " returned malformed JSON: " + e.what());
    }
  }
};

RemoteProvider::RemoteProvider(RemoteConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  if (config_.url.empty()) throw ConfigError("remote provider needs a url");
  impl_->url = config_.url;
  impl_->timeout = config_.timeout_seconds;
  if (config_.bearer_token && !config_.bearer_token->empty()) {
    impl_->headers.emplace("Authorization", "Bearer " + *config_.bearer_token);
  }
}

RemoteProvider::~RemoteProvider() = default;

std::string RemoteProvider::generate(const std::string& prompt, std::size_t max_chars,
                                     double temperature) {
  const Json res = impl_->post("/v1/generate", Json{{"role", to_string(config_.role)},
                                                    {"prompt", prompt},
                                                    {"max_chars", max_chars},
                                                    {"temperature", temperature}});
  if (!res.contains("text") || !res["text"].is_string()) {
    throw TransportError("/v1/generate answer lacks a text field");
  }
  return res["text"].get<std::string>();
}

std::vector<double> RemoteProvider::score_actions(const std::string& prompt,
                                                  const std::vector<std::string>& actions) {
  const Json res = impl_->post("/v1/score_actions", Json{{"prompt", prompt}, {"actions", actions}});
  if (!res.contains("scores") || !res["scores"].is_array()) {
    throw TransportError("/v1/score_actions answer lacks a scores array");
  }
  std::vector<double> out;
  for (const auto& s : res["scores"]) {
    if (!s.is_number()) throw TransportError("/v1/score_actions returned a non-numeric score");
    out.push_back(s.get<double>());
  }
  return out;
}

Embedding RemoteProvider::embed(const std::string& text) {
  const Json res = impl_->post("/v1/embed", Json{{"text", text}});
  if (!res.contains("vector") || !res["vector"].is_array()) {
    throw TransportError("/v1/embed answer lacks a vector array");
  }
  Embedding v;
  for (const auto& x : res["vector"]) {
    if (!x.is_number()) throw TransportError("/v1/embed returned a non-numeric component");
    v.push_back(x.get<double>());
  }
  std::size_t expected = 0;
  if (!impl_->dimension.compare_exchange_strong(expected, v.size()) && expected != v.size()) {
    throw DimensionMismatch("/v1/embed returned dimension " + std::to_string(v.size()) +
                            ", expected " + std::to_string(expected));
  }
  return v;
}

}  // namespace wkm
