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


#include "nodulegen/study/server.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "nodulegen/common/jsonl.hpp"

namespace nodulegen::study {

int http_status(StudyErrc code) noexcept {
    switch (code) {
        case StudyErrc::UnknownStudy:
        case StudyErrc::UnknownSession:
        case StudyErrc::UnknownItem: return 404;
        case StudyErrc::DuplicateRating:
        case StudyErrc::StudyClosed:
        case StudyErrc::StudyOpen:
        case StudyErrc::SessionComplete: return 409;
        case StudyErrc::IncompleteScores:
        case StudyErrc::InvalidScore:
        case StudyErrc::InsufficientImages:
        case StudyErrc::EmptySample:
        case StudyErrc::NoData: return 422;
        case StudyErrc::BadRequest: return 400;
        case StudyErrc::CorruptLog: return 500;
    }
    return 500;
}

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, {{"error", code}, {"message", message}});
}

Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
            h(req, res);
        } catch (const StudyError& e) {
            send_error(res, http_status(e.code()), code_name(e.code()), e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, code_name(StudyErrc::BadRequest), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "InternalError", e.what());
        }
    };
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw StudyError(StudyErrc::BadRequest, "request body must be a JSON object");
    }
    return j;
}

json progress_json(const NextItem& n) { return {{"rated", n.rated}, {"total", n.total}}; }

json summary_json(const StudySummary& s) {
    json cells = json::array();
    for (const auto& c : s.cells) {
        cells.push_back({{"category", c.category},
                         {"source", source_name(c.source)},
                         {"n", c.n},
                         {"mean", c.mean},
                         {"sd", c.sd},
                         {"cell", format_mean_sd(c.mean, c.sd)}});
    }
    json tests = json::array();
    for (const auto& t : s.tests) {
        tests.push_back({{"category", t.category},
                         {"model", source_name(t.model)},
                         {"u", t.u},
                         {"p", t.p},
                         {"exact", t.exact},
                         {"significant", t.significant}});
    }
    return {{"alpha", s.alpha}, {"ratings", s.ratings}, {"cells", cells}, {"tests", tests},
            {"table", render_summary(s)}, {"pooling", "ratings pooled across raters"}};
}

}  // namespace

struct StudyServer::Impl {
    StudyService& service;
    httplib::Server http;
    std::thread worker;

    explicit Impl(StudyService& s) : service(s) {}
};

StudyServer::StudyServer(StudyService& service, ServerOptions options) : impl_(std::make_unique<Impl>(service)) {
    auto& http = impl_->http;
    auto& svc = impl_->service;

    http.Post("/study", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto id = svc.create_study(parse_study_config(body_of(req)));
        send_json(res, 201, {{"study_id", id}});
    }));

    http.Post("/study/:id/session", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        std::optional<std::uint64_t> seed;
        if (body.contains("seed")) seed = body.at("seed").get<std::uint64_t>();
        const auto session = svc.create_session(req.path_params.at("id"), body.value("rater_id", ""), seed);
        send_json(res, 201, {{"session_id", session.session_id}, {"total", session.items.size()}});
    }));

    http.Get("/session/:id/next", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto next = svc.next(req.path_params.at("id"));
        json body{{"progress", progress_json(next)}, {"complete", !next.item.has_value()}, {"item", nullptr}};
        if (next.item) body["item"] = {{"item_id", next.item->item_id}, {"image_url", next.item->image_url}};
        send_json(res, 200, body);
    }));

    http.Post("/session/:id/rating", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        if (!body.contains("item_id") || !body.at("item_id").is_string()) {
            throw StudyError(StudyErrc::BadRequest, "item_id is required");
        }
        if (!body.contains("scores") || !body.at("scores").is_object()) {
            throw StudyError(StudyErrc::IncompleteScores, "scores object is required");
        }
        Scores scores;
        for (const auto& [k, v] : body.at("scores").items()) {
            if (!v.is_number_integer()) throw StudyError(StudyErrc::InvalidScore, k + " must be an integer");
            scores.emplace(k, v.get<int>());
        }
        const auto next = svc.record_rating(req.path_params.at("id"), body.at("item_id").get<std::string>(), scores);
        send_json(res, 201, {{"recorded", true}, {"progress", progress_json(next)}});
    }));

    http.Get("/session/:id/image/:item", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto path = svc.image_path(req.path_params.at("id"), req.path_params.at("item"));
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            send_error(res, 404, "ImageUnavailable", "image file is missing");
            return;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        res.set_header("Cache-Control", "no-store");
        res.set_content(ss.str(), "image/png");
    }));

    http.Post("/study/:id/close", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        svc.close_study(req.path_params.at("id"));
        send_json(res, 200, {{"study_id", req.path_params.at("id")}, {"closed", true}});
    }));

    http.Get("/study/:id/summary", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        double alpha = kDefaultAlpha;
        if (req.has_param("alpha")) alpha = std::stod(req.get_param_value("alpha"));
        send_json(res, 200, summary_json(svc.summary(req.path_params.at("id"), alpha)));
    }));

    if (!options.static_dir.empty() && !http.set_mount_point("/", options.static_dir)) {
        throw StudyError(StudyErrc::BadRequest, "static directory " + options.static_dir + " does not exist");
    }
}

StudyServer::~StudyServer() {
    stop();
    wait();
}

int StudyServer::start(const std::string& host, int port) {
    auto& http = impl_->http;
    int bound = port;
    if (port == 0) {
        bound = http.bind_to_any_port(host);
    } else if (!http.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    impl_->worker = std::thread([&http] { http.listen_after_bind(); });
    return bound;
}

void StudyServer::wait() {
    if (impl_->worker.joinable()) impl_->worker.join();
}

void StudyServer::stop() { impl_->http.stop(); }

}  // namespace nodulegen::study
