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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "nodulegen/study/store.hpp"
#include "nodulegen/study/summary.hpp"

namespace nodulegen::study {

struct ServiceOptions {
    std::string log_dir;  ///< one <study id>.jsonl per study; empty keeps state in memory
    std::optional<std::uint64_t> id_seed;  ///< unset draws from std::random_device
};

struct ItemView {
    std::string item_id;
    std::string image_url;
};

struct NextItem {
    std::optional<ItemView> item;  ///< empty once every item is rated
    std::size_t rated = 0;
    std::size_t total = 0;
};

/// Studies, sessions and ratings behind the HTTP API. Safe for concurrent
/// callers; writes to one study are serialized and logged before they return.
class StudyService {
public:
    /// Replays every log already in options.log_dir.
    explicit StudyService(ServiceOptions options = {});

    std::string create_study(const StudyConfig& config);
    RatingSession create_session(const std::string& study_id, const std::string& rater_id,
                                 std::optional<std::uint64_t> seed = std::nullopt);
    [[nodiscard]] NextItem next(const std::string& session_id) const;
    /// Returns the session's progress after the rating is durable.
    NextItem record_rating(const std::string& session_id, const std::string& item_id, const Scores& scores);
    void close_study(const std::string& study_id);
    /// Closed studies only; throws StudyOpen otherwise.
    [[nodiscard]] StudySummary summary(const std::string& study_id, double alpha = kDefaultAlpha) const;
    [[nodiscard]] std::string image_path(const std::string& session_id, const std::string& item_id) const;

    /// Consistent copy of one study's state.
    [[nodiscard]] StudyState snapshot(const std::string& study_id) const;
    [[nodiscard]] std::vector<std::string> study_ids() const;

private:
    struct Study {
        mutable std::mutex mutex;
        StudyState state;
        RatingLog log;
    };

    Study& study(const std::string& study_id) const;
    Study& study_of_session(const std::string& session_id) const;
    void commit(Study& s, const json& event);
    std::string fresh_id(const char* prefix);

    ServiceOptions options_;
    mutable std::shared_mutex mutex_;  ///< guards the maps and the id generator
    std::map<std::string, std::unique_ptr<Study>, std::less<>> studies_;
    std::map<std::string, std::string, std::less<>> session_owner_;
    std::mt19937_64 ids_;
};

[[nodiscard]] std::string utc_timestamp();

}  // namespace nodulegen::study
