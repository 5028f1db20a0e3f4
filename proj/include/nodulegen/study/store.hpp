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

#include <cstdio>
#include <string>
#include <vector>

#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/study/session.hpp"

namespace nodulegen::study {

struct StudyConfig {
    std::string name;
    ImagePools pools;
    std::size_t per_source = kDefaultPerSource;

    friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

[[nodiscard]] StudyConfig parse_study_config(const json& j);
[[nodiscard]] json to_json(const StudyConfig& config);

/// Everything a study log describes. Built only by applying log events, so
/// live state and a replayed log cannot drift apart.
struct StudyState {
    std::string study_id;
    StudyConfig config;
    bool closed = false;
    std::vector<RatingSession> sessions;
    std::vector<Rating> ratings;

    [[nodiscard]] const RatingSession* session(std::string_view session_id) const;

    /// Throws the error the rating would be rejected with, if any.
    void check_rating(const Rating& rating) const;

    /// Applies one event. Throws CorruptLog on an unknown or inconsistent event.
    void apply(const json& event);

    friend bool operator==(const StudyState&, const StudyState&) = default;
};

[[nodiscard]] json study_event(const std::string& study_id, const StudyConfig& config);
[[nodiscard]] json session_event(const RatingSession& session);
[[nodiscard]] json rating_event(const Rating& rating);
[[nodiscard]] json close_event(const std::string& timestamp);

/// Append-only JSON Lines file. Each append is flushed and synced before it
/// returns.
class RatingLog {
public:
    RatingLog() = default;
    explicit RatingLog(const std::string& path);
    RatingLog(RatingLog&& other) noexcept;
    RatingLog& operator=(RatingLog&& other) noexcept;
    RatingLog(const RatingLog&) = delete;
    RatingLog& operator=(const RatingLog&) = delete;
    ~RatingLog();

    void append(const json& event);
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    std::FILE* file_ = nullptr;
};

/// Reads a log. A final line cut short by a crash was never acknowledged and is
/// dropped; any other malformed line throws CorruptLog.
[[nodiscard]] std::vector<json> read_log(const std::string& path);

[[nodiscard]] StudyState replay_log(const std::string& path);

}  // namespace nodulegen::study
