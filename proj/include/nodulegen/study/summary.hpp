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

#include <span>
#include <string>
#include <vector>

#include "nodulegen/study/session.hpp"

namespace nodulegen::study {

inline constexpr double kDefaultAlpha = 0.05;

struct SourceCell {
    std::string category;
    Source source = Source::Real;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< sample (n - 1); 0 for a single rating
};

struct SourceTest {
    std::string category;
    Source model = Source::SDv1;  ///< compared against Real
    double u = 0.0;
    double p = 1.0;
    bool exact = false;
    bool significant = false;
};

struct StudySummary {
    double alpha = kDefaultAlpha;
    std::size_t ratings = 0;
    std::vector<SourceCell> cells;   ///< category-major, kSources order
    std::vector<SourceTest> tests;   ///< category-major, SDv1 then SDv2

    [[nodiscard]] const SourceCell& cell(std::string_view category, Source source) const;
    [[nodiscard]] const SourceTest& test(std::string_view category, Source model) const;
};

/// "3.48 ± 1.01".
[[nodiscard]] std::string format_mean_sd(double mean, double sd);

/// Pools every rating across raters. Each rating's source is looked up in the
/// session that owns it. Throws NoData when a source has no ratings and
/// UnknownItem for a rating outside the given sessions.
[[nodiscard]] StudySummary summarize_study(std::span<const Rating> ratings,
                                           std::span<const RatingSession> sessions,
                                           double alpha = kDefaultAlpha);

/// Tab-separated table in category x source layout, then one line per test.
[[nodiscard]] std::string render_summary(const StudySummary& summary);

}  // namespace nodulegen::study
