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


#include "nodulegen/study/session.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <span>

#include "nodulegen/common/random.hpp"

namespace nodulegen::study {

const char* code_name(StudyErrc code) noexcept {
    switch (code) {
        case StudyErrc::InsufficientImages: return "InsufficientImages";
        case StudyErrc::DuplicateRating: return "DuplicateRating";
        case StudyErrc::UnknownItem: return "UnknownItem";
        case StudyErrc::IncompleteScores: return "IncompleteScores";
        case StudyErrc::InvalidScore: return "InvalidScore";
        case StudyErrc::UnknownStudy: return "UnknownStudy";
        case StudyErrc::UnknownSession: return "UnknownSession";
        case StudyErrc::StudyClosed: return "StudyClosed";
        case StudyErrc::StudyOpen: return "StudyOpen";
        case StudyErrc::SessionComplete: return "SessionComplete";
        case StudyErrc::EmptySample: return "EmptySample";
        case StudyErrc::NoData: return "NoData";
        case StudyErrc::BadRequest: return "BadRequest";
        case StudyErrc::CorruptLog: return "CorruptLog";
    }
    return "StudyError";
}

const char* source_name(Source s) noexcept {
    switch (s) {
        case Source::Real: return "real";
        case Source::SDv1: return "sdv1";
        case Source::SDv2: return "sdv2";
    }
    return "?";
}

const char* source_label(Source s) noexcept {
    switch (s) {
        case Source::Real: return "Real";
        case Source::SDv1: return "SDv1";
        case Source::SDv2: return "SDv2";
    }
    return "?";
}

Source parse_source(std::string_view name) {
    for (const auto s : kSources) {
        if (name == source_name(s)) return s;
    }
    throw StudyError(StudyErrc::BadRequest, "unknown source '" + std::string(name) + "'");
}

const SessionItem* RatingSession::find(std::string_view item_id) const {
    const auto it = std::find_if(items.begin(), items.end(), [&](const SessionItem& i) { return i.item_id == item_id; });
    return it == items.end() ? nullptr : &*it;
}

const std::vector<std::string>& ImagePools::of(Source s) const {
    switch (s) {
        case Source::Real: return real;
        case Source::SDv1: return sdv1;
        case Source::SDv2: return sdv2;
    }
    return real;
}

namespace {

std::string item_token(std::uint64_t seed, std::size_t position) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(derive_seed(seed, 1000 + position)));
    return buf;
}

}  // namespace

RatingSession build_session(const ImagePools& pools, std::size_t per_source, std::uint64_t seed,
                            std::string session_id, std::string rater_id) {
    for (const auto s : kSources) {
        if (pools.of(s).size() < per_source) {
            throw StudyError(StudyErrc::InsufficientImages,
                             std::string(source_name(s)) + " has " + std::to_string(pools.of(s).size()) +
                                 " images, need " + std::to_string(per_source));
        }
    }
    std::mt19937_64 rng(seed);
    RatingSession session{std::move(session_id), std::move(rater_id), {}, 0};
    for (const auto s : kSources) {
        const auto& pool = pools.of(s);
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Partial Fisher-Yates: the first per_source slots are a uniform sample.
        for (std::size_t i = 0; i < per_source; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
            std::swap(order[i], order[j]);
            session.items.push_back({"", pool[order[i]], s});
        }
    }
    seeded_shuffle(std::span(session.items), rng);
    for (std::size_t i = 0; i < session.items.size(); ++i) session.items[i].item_id = item_token(seed, i);
    return session;
}

void validate_scores(const Scores& scores) {
    for (const auto category : kCategories) {
        const auto it = scores.find(category);
        if (it == scores.end()) {
            throw StudyError(StudyErrc::IncompleteScores, "missing " + std::string(category));
        }
        if (it->second < kMinScore || it->second > kMaxScore) {
            throw StudyError(StudyErrc::InvalidScore,
                             std::string(category) + " score " + std::to_string(it->second) + " outside [1, 5]");
        }
    }
    for (const auto& [name, value] : scores) {
        if (std::find(kCategories.begin(), kCategories.end(), name) == kCategories.end()) {
            throw StudyError(StudyErrc::IncompleteScores, "unknown category " + name);
        }
    }
}

}  // namespace nodulegen::study
