// Copyright 2026 The nodulegen Authors
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

#include <string>
#include <vector>

#include <json.hpp>

namespace nodulegen {

using json = nlohmann::json;

/// Reads a JSON Lines file; blank lines are skipped.
[[nodiscard]] std::vector<json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<json>& rows);

[[nodiscard]] json read_json(const std::string& path);
void write_json(const std::string& path, const json& value);

}  // namespace nodulegen
