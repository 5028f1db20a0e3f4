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


#include <cstdio>
#include <exception>

#include "commands.hpp"

namespace nodulegen::cli {

std::string rebase(const std::string& path, const std::filesystem::path& from_dir,
                   const std::filesystem::path& to_dir) {
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    const auto full = std::filesystem::absolute(from_dir / p).lexically_normal();
    return full.lexically_relative(std::filesystem::absolute(to_dir).lexically_normal()).string();
}

std::filesystem::path dir_of(const std::string& file) {
    const auto parent = std::filesystem::path(file).parent_path();
    return parent.empty() ? std::filesystem::path(".") : parent;
}

}  // namespace nodulegen::cli

int main(int argc, char** argv) {
    CLI::App app{"Nodule image generation toolkit: ingest, prompts, dataset, metrics, toy diffusion, reader study"};
    app.require_subcommand(1);
    nodulegen::cli::add_data_commands(app);
    nodulegen::cli::add_metric_commands(app);
    nodulegen::cli::add_toy_commands(app);
    nodulegen::cli::add_study_commands(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
