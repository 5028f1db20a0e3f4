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

#include <filesystem>
#include <string>

#include <CLI11.hpp>

namespace nodulegen::cli {

void add_data_commands(CLI::App& app);
void add_metric_commands(CLI::App& app);
void add_toy_commands(CLI::App& app);
void add_study_commands(CLI::App& app);

/// `path` as written in a manifest under `from_dir`, re-expressed relative to
/// `to_dir`. Absolute paths stay absolute.
std::string rebase(const std::string& path, const std::filesystem::path& from_dir,
                   const std::filesystem::path& to_dir);

/// Directory holding `file`, "." when it has none.
std::filesystem::path dir_of(const std::string& file);

}  // namespace nodulegen::cli
