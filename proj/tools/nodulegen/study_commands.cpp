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


#include <csignal>
#include <cstdio>

#include "commands.hpp"
#include "nodulegen/study/server.hpp"

namespace nodulegen::cli {

namespace {

study::StudyServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

struct ServeArgs {
    std::string study;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string log_dir = "study-logs";
    std::string static_dir;
};

void run_serve(const ServeArgs& a) {
    study::StudyService service(study::ServiceOptions{.log_dir = a.log_dir, .id_seed = std::nullopt});
    if (!a.study.empty()) {
        const auto config = study::parse_study_config(read_json(a.study));
        std::string id;
        for (const auto& existing : service.study_ids()) {
            const auto state = service.snapshot(existing);
            if (state.config == config && !state.closed) id = existing;
        }
        if (id.empty()) {
            id = service.create_study(config);
            std::printf("created study %s\n", id.c_str());
        } else {
            std::printf("resuming study %s\n", id.c_str());
        }
    }
    study::StudyServer server(service, {.static_dir = a.static_dir});
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int port = server.start(a.host, a.port);
    std::printf("listening on http://%s:%d (logs in %s)\n", a.host.c_str(), port, a.log_dir.c_str());
    std::fflush(stdout);
    server.wait();
    g_server = nullptr;
}

void run_report(const std::string& log, double alpha, const std::string& out) {
    const auto state = study::replay_log(log);
    const auto summary = study::summarize_study(state.ratings, state.sessions, alpha);
    if (!state.closed) std::fprintf(stderr, "note: study %s is still open\n", state.study_id.c_str());
    const auto table = study::render_summary(summary);
    std::printf("%s", table.c_str());
    if (!out.empty()) {
        json cells = json::array();
        for (const auto& c : summary.cells) {
            cells.push_back({{"category", c.category}, {"source", study::source_name(c.source)}, {"n", c.n},
                             {"mean", c.mean}, {"sd", c.sd}});
        }
        json tests = json::array();
        for (const auto& t : summary.tests) {
            tests.push_back({{"category", t.category}, {"model", study::source_name(t.model)}, {"u", t.u},
                             {"p", t.p}, {"significant", t.significant}});
        }
        write_json(out, {{"study_id", state.study_id}, {"alpha", alpha}, {"cells", cells}, {"tests", tests},
                         {"table", table}});
    }
}

}  // namespace

void add_study_commands(CLI::App& app) {
    {
        auto* cmd = app.add_subcommand("serve", "Run the blinded rating service");
        auto a = std::make_shared<ServeArgs>();
        cmd->add_option("--study", a->study, "Study config JSON to create (or resume) at startup");
        cmd->add_option("--host", a->host)->capture_default_str();
        cmd->add_option("--port", a->port, "0 picks a free port")->capture_default_str();
        cmd->add_option("--log-dir", a->log_dir, "One JSON Lines log per study")->capture_default_str();
        cmd->add_option("--static", a->static_dir, "Directory served at / (rater frontend bundle)");
        cmd->callback([=] { run_serve(*a); });
    }
    {
        auto* cmd = app.add_subcommand("report", "Summarize a study log: mean ± sd per source, Mann-Whitney U");
        auto log = std::make_shared<std::string>();
        auto alpha = std::make_shared<double>(study::kDefaultAlpha);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--log", *log, "Study log (JSON Lines)")->required();
        cmd->add_option("--alpha", *alpha)->capture_default_str();
        cmd->add_option("--out", *out, "Summary JSON");
        cmd->callback([=] { run_report(*log, *alpha, *out); });
    }
}

}  // namespace nodulegen::cli
