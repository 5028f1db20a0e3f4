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


#include "nodulegen/study/store.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace nodulegen::study {

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_array()) {
        throw StudyError(StudyErrc::BadRequest, std::string(key) + " must be a list of image paths");
    }
    std::vector<std::string> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_string()) throw StudyError(StudyErrc::BadRequest, std::string(key) + " entries must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

[[noreturn]] void corrupt(const std::string& detail) { throw StudyError(StudyErrc::CorruptLog, detail); }

Scores parse_scores(const json& j) {
    if (!j.is_object()) throw StudyError(StudyErrc::BadRequest, "scores must be an object");
    Scores out;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number_integer()) throw StudyError(StudyErrc::InvalidScore, k + " must be an integer");
        out.emplace(k, v.get<int>());
    }
    return out;
}

// Splits the file into complete lines. `tail` receives bytes after the last
// newline.
std::vector<std::string> split_lines(const std::string& text, std::string& tail) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t nl; (nl = text.find('\n', start)) != std::string::npos; start = nl + 1) {
        lines.push_back(text.substr(start, nl - start));
    }
    tail = text.substr(start);
    return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StudyError(StudyErrc::CorruptLog, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

StudyConfig parse_study_config(const json& j) {
    if (!j.is_object()) throw StudyError(StudyErrc::BadRequest, "study config must be an object");
    StudyConfig c;
    c.name = j.value("name", "");
    const json& pools = j.contains("pools") ? j.at("pools") : j;
    if (!pools.is_object()) throw StudyError(StudyErrc::BadRequest, "pools must be an object");
    c.pools.real = string_list(pools, "real");
    c.pools.sdv1 = string_list(pools, "sdv1");
    c.pools.sdv2 = string_list(pools, "sdv2");
    if (j.contains("per_source")) {
        if (!j.at("per_source").is_number_unsigned() || j.at("per_source").get<std::size_t>() == 0) {
            throw StudyError(StudyErrc::BadRequest, "per_source must be a positive integer");
        }
        c.per_source = j.at("per_source").get<std::size_t>();
    }
    return c;
}

json to_json(const StudyConfig& c) {
    return {{"name", c.name},
            {"per_source", c.per_source},
            {"pools", {{"real", c.pools.real}, {"sdv1", c.pools.sdv1}, {"sdv2", c.pools.sdv2}}}};
}

json study_event(const std::string& study_id, const StudyConfig& config) {
    return {{"type", "study"}, {"study_id", study_id}, {"config", to_json(config)}};
}

json session_event(const RatingSession& s) {
    json items = json::array();
    for (const auto& i : s.items) {
        items.push_back({{"item_id", i.item_id}, {"image_path", i.image_path}, {"source", source_name(i.source)}});
    }
    return {{"type", "session"}, {"session_id", s.session_id}, {"rater_id", s.rater_id}, {"items", items}};
}

json rating_event(const Rating& r) {
    json scores = json::object();
    for (const auto& [k, v] : r.scores) scores[k] = v;
    return {{"type", "rating"},
            {"session_id", r.session_id},
            {"item_id", r.item_id},
            {"scores", scores},
            {"timestamp", r.timestamp}};
}

json close_event(const std::string& timestamp) { return {{"type", "close"}, {"timestamp", timestamp}}; }

const RatingSession* StudyState::session(std::string_view session_id) const {
    for (const auto& s : sessions) {
        if (s.session_id == session_id) return &s;
    }
    return nullptr;
}

void StudyState::check_rating(const Rating& r) const {
    const RatingSession* s = session(r.session_id);
    if (s == nullptr) throw StudyError(StudyErrc::UnknownSession, r.session_id);
    if (closed) throw StudyError(StudyErrc::StudyClosed, study_id);
    if (s->find(r.item_id) == nullptr) throw StudyError(StudyErrc::UnknownItem, r.item_id);
    for (const auto& prior : ratings) {
        if (prior.session_id == r.session_id && prior.item_id == r.item_id) {
            throw StudyError(StudyErrc::DuplicateRating, "item " + r.item_id + " already rated");
        }
    }
    validate_scores(r.scores);
}

void StudyState::apply(const json& e) {
    try {
        const auto type = e.at("type").get<std::string>();
        if (type == "study") {
            if (!study_id.empty()) corrupt("second study header");
            study_id = e.at("study_id").get<std::string>();
            config = parse_study_config(e.at("config"));
            return;
        }
        if (study_id.empty()) corrupt("event before the study header");
        if (type == "session") {
            if (closed) corrupt("session after close");
            RatingSession s;
            s.session_id = e.at("session_id").get<std::string>();
            s.rater_id = e.at("rater_id").get<std::string>();
            if (session(s.session_id) != nullptr) corrupt("duplicate session " + s.session_id);
            for (const auto& i : e.at("items")) {
                s.items.push_back({i.at("item_id").get<std::string>(), i.at("image_path").get<std::string>(),
                                   parse_source(i.at("source").get<std::string>())});
            }
            sessions.push_back(std::move(s));
        } else if (type == "rating") {
            Rating r{e.at("session_id").get<std::string>(), e.at("item_id").get<std::string>(),
                     parse_scores(e.at("scores")), e.value("timestamp", "")};
            check_rating(r);
            for (auto& s : sessions) {
                if (s.session_id == r.session_id) ++s.cursor;
            }
            ratings.push_back(std::move(r));
        } else if (type == "close") {
            closed = true;
        } else {
            corrupt("unknown event type '" + type + "'");
        }
    } catch (const json::exception& ex) {
        corrupt(ex.what());
    } catch (const StudyError& ex) {
        if (ex.code() == StudyErrc::CorruptLog) throw;
        corrupt(ex.what());
    }
}

RatingLog::RatingLog(const std::string& path) : path_(path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) {
        // Drop a torn final line so the next append starts on a fresh line.
        std::string tail;
        const auto text = slurp(path);
        (void)split_lines(text, tail);
        if (!tail.empty()) {
            if (json::accept(tail)) {
                std::ofstream(path, std::ios::app) << '\n';
            } else {
                fs::resize_file(path, text.size() - tail.size());
            }
        }
    }
    file_ = std::fopen(path.c_str(), "a");
    if (file_ == nullptr) throw StudyError(StudyErrc::CorruptLog, "cannot open " + path + " for append");
}

RatingLog::RatingLog(RatingLog&& o) noexcept : path_(std::move(o.path_)), file_(o.file_) { o.file_ = nullptr; }

RatingLog& RatingLog::operator=(RatingLog&& o) noexcept {
    if (this != &o) {
        if (file_ != nullptr) std::fclose(file_);
        path_ = std::move(o.path_);
        file_ = o.file_;
        o.file_ = nullptr;
    }
    return *this;
}

RatingLog::~RatingLog() {
    if (file_ != nullptr) std::fclose(file_);
}

void RatingLog::append(const json& event) {
    if (file_ == nullptr) return;
    const auto line = event.dump() + '\n';
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0 ||
        ::fsync(::fileno(file_)) != 0) {
        throw StudyError(StudyErrc::CorruptLog, "write to " + path_ + " failed");
    }
}

std::vector<json> read_log(const std::string& path) {
    std::string tail;
    const auto lines = split_lines(slurp(path), tail);
    std::vector<json> events;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        try {
            events.push_back(json::parse(lines[i]));
        } catch (const json::parse_error& e) {
            corrupt(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    if (!blank(tail) && json::accept(tail)) events.push_back(json::parse(tail));
    return events;
}

StudyState replay_log(const std::string& path) {
    StudyState state;
    for (const auto& e : read_log(path)) state.apply(e);
    if (state.study_id.empty()) corrupt(path + " has no study header");
    return state;
}

}  // namespace nodulegen::study
