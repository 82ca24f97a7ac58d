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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wkm {

// Insertion-ordered so emitted files list fields in declaration order.
using Json = nlohmann::ordered_json;

// Reads a line-delimited JSON file. Blank lines are skipped. Parse errors are
// reported as FormatError naming the 1-based line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Calls fn(json, line_number) for every non-blank line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace wkm
