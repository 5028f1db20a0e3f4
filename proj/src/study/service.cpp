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


#include "nodulegen/study/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <set>

namespace nodulegen::study {

namespace fs = std::filesystem;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

StudyService::StudyService(ServiceOptions options)
    : options_(std::move(options)), ids_(options_.id_seed ? *options_.id_seed : std::random_device{}()) {
    if (options_.log_dir.empty()) return;
    fs::create_directories(options_.log_dir);
    std::vector<fs::path> logs;
    for (const auto& entry : fs::directory_iterator(options_.log_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") logs.push_back(entry.path());
    }
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
        auto s = std::make_unique<Study>();
        s->state = replay_log(path.string());
        if (studies_.contains(s->state.study_id)) {
            throw StudyError(StudyErrc::CorruptLog, "study " + s->state.study_id + " appears in two logs");
        }
        s->log = RatingLog(path.string());
        for (const auto& session : s->state.sessions) session_owner_.emplace(session.session_id, s->state.study_id);
        studies_.emplace(s->state.study_id, std::move(s));
    }
}

std::string StudyService::fresh_id(const char* prefix) {
    for (;;) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s-%016llx", prefix, static_cast<unsigned long long>(ids_()));
        if (!studies_.contains(buf) && !session_owner_.contains(buf)) return buf;
    }
}

StudyService::Study& StudyService::study(const std::string& study_id) const {
    std::shared_lock lock(mutex_);
    const auto it = studies_.find(study_id);
    if (it == studies_.end()) throw StudyError(StudyErrc::UnknownStudy, study_id);
    return *it->second;
}

StudyService::Study& StudyService::study_of_session(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    const auto owner = session_owner_.find(session_id);
    if (owner == session_owner_.end()) throw StudyError(StudyErrc::UnknownSession, session_id);
    return *studies_.at(owner->second);
}

void StudyService::commit(Study& s, const json& event) {
    s.log.append(event);
    s.state.apply(event);
}

std::string StudyService::create_study(const StudyConfig& config) {
    if (config.per_source == 0) throw StudyError(StudyErrc::BadRequest, "per_source must be positive");
    std::unique_lock lock(mutex_);
    const auto id = fresh_id("study");
    auto s = std::make_unique<Study>();
    if (!options_.log_dir.empty()) s->log = RatingLog((fs::path(options_.log_dir) / (id + ".jsonl")).string());
    commit(*s, study_event(id, config));
    studies_.emplace(id, std::move(s));
    return id;
}

RatingSession StudyService::create_session(const std::string& study_id, const std::string& rater_id,
                                           std::optional<std::uint64_t> seed) {
    Study& s = study(study_id);
    std::string session_id;
    {
        std::unique_lock lock(mutex_);
        session_id = fresh_id("session");
        if (!seed) seed = ids_();
        session_owner_.emplace(session_id, study_id);  // reserve the id
    }
    try {
        std::lock_guard guard(s.mutex);
        if (s.state.closed) throw StudyError(StudyErrc::StudyClosed, study_id);
        auto session = build_session(s.state.config.pools, s.state.config.per_source, *seed, session_id, rater_id);
        commit(s, session_event(session));
        return session;
    } catch (...) {
        std::unique_lock lock(mutex_);
        session_owner_.erase(session_id);
        throw;
    }
}

namespace {

NextItem progress_of(const StudyState& state, const RatingSession& session) {
    std::set<std::string_view> rated;
    for (const auto& r : state.ratings) {
        if (r.session_id == session.session_id) rated.insert(r.item_id);
    }
    NextItem out{std::nullopt, rated.size(), session.items.size()};
    for (const auto& item : session.items) {
        if (!rated.contains(item.item_id)) {
            out.item = ItemView{item.item_id, "/session/" + session.session_id + "/image/" + item.item_id};
            break;
        }
    }
    return out;
}

}  // namespace

NextItem StudyService::next(const std::string& session_id) const {
    Study& s = study_of_session(session_id);
    std::lock_guard guard(s.mutex);
    const auto* session = s.state.session(session_id);
    if (session == nullptr) throw StudyError(StudyErrc::UnknownSession, session_id);
    return progress_of(s.state, *session);
}

NextItem StudyService::record_rating(const std::string& session_id, const std::string& item_id,
                                     const Scores& scores) {
    Study& s = study_of_session(session_id);
    std::lock_guard guard(s.mutex);
    const Rating rating{session_id, item_id, scores, utc_timestamp()};
    s.state.check_rating(rating);
    commit(s, rating_event(rating));
    return progress_of(s.state, *s.state.session(session_id));
}

void StudyService::close_study(const std::string& study_id) {
    Study& s = study(study_id);
    std::lock_guard guard(s.mutex);
    if (s.state.closed) return;
    commit(s, close_event(utc_timestamp()));
}

StudyState StudyService::snapshot(const std::string& study_id) const {
    Study& s = study(study_id);
    std::lock_guard guard(s.mutex);
    return s.state;
}

StudySummary StudyService::summary(const std::string& study_id, double alpha) const {
    const auto state = snapshot(study_id);
    if (!state.closed) throw StudyError(StudyErrc::StudyOpen, "summary is available once the study is closed");
    return summarize_study(state.ratings, state.sessions, alpha);
}

std::string StudyService::image_path(const std::string& session_id, const std::string& item_id) const {
    Study& s = study_of_session(session_id);
    std::lock_guard guard(s.mutex);
    const auto* session = s.state.session(session_id);
    const SessionItem* item = session == nullptr ? nullptr : session->find(item_id);
    if (item == nullptr) throw StudyError(StudyErrc::UnknownItem, item_id);
    return item->image_path;
}

std::vector<std::string> StudyService::study_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : studies_) out.push_back(id);
    return out;
}

}  // namespace nodulegen::study
