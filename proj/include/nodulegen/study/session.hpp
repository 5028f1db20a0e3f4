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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nodulegen/study/error.hpp"

namespace nodulegen::study {

enum class Source { Real, SDv1, SDv2 };

inline constexpr std::array<Source, 3> kSources{Source::Real, Source::SDv1, Source::SDv2};

[[nodiscard]] const char* source_name(Source s) noexcept;     ///< "real", "sdv1", "sdv2"
[[nodiscard]] const char* source_label(Source s) noexcept;    ///< "Real", "SDv1", "SDv2"
[[nodiscard]] Source parse_source(std::string_view name);

/// Rating categories in table order.
inline constexpr std::array<std::string_view, 7> kCategories{
    "Realism", "Malignancy", "Sphericity", "Texture", "Margin", "Spiculation", "Lobulation"};

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;
inline constexpr std::size_t kDefaultPerSource = 20;

struct SessionItem {
    std::string item_id;     ///< opaque; reveals nothing about the source
    std::string image_path;
    Source source = Source::Real;

    friend bool operator==(const SessionItem&, const SessionItem&) = default;
};

struct RatingSession {
    std::string session_id;
    std::string rater_id;
    std::vector<SessionItem> items;
    std::size_t cursor = 0;  ///< number of items rated so far

    [[nodiscard]] bool complete() const noexcept { return cursor == items.size(); }
    [[nodiscard]] const SessionItem* find(std::string_view item_id) const;

    friend bool operator==(const RatingSession&, const RatingSession&) = default;
};

struct ImagePools {
    std::vector<std::string> real;
    std::vector<std::string> sdv1;
    std::vector<std::string> sdv2;

    [[nodiscard]] const std::vector<std::string>& of(Source s) const;

    friend bool operator==(const ImagePools&, const ImagePools&) = default;
};

/// Samples `per_source` images from each pool without replacement and shuffles
/// the union; the result depends only on the pools, `per_source` and `seed`.
/// Throws InsufficientImages naming the short pool.
[[nodiscard]] RatingSession build_session(const ImagePools& pools, std::size_t per_source,
                                          std::uint64_t seed, std::string session_id,
                                          std::string rater_id);

using Scores = std::map<std::string, int, std::less<>>;

struct Rating {
    std::string session_id;
    std::string item_id;
    Scores scores;
    std::string timestamp;  ///< ISO 8601, UTC

    friend bool operator==(const Rating&, const Rating&) = default;
};

/// Throws IncompleteScores when a category is missing or unknown, InvalidScore
/// when a value falls outside [kMinScore, kMaxScore].
void validate_scores(const Scores& scores);

}  // namespace nodulegen::study
