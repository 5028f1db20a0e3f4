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


#include "nodulegen/study/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "nodulegen/study/mann_whitney.hpp"

namespace nodulegen::study {

const SourceCell& StudySummary::cell(std::string_view category, Source source) const {
    for (const auto& c : cells) {
        if (c.category == category && c.source == source) return c;
    }
    throw StudyError(StudyErrc::NoData, std::string(category) + "/" + source_label(source));
}

const SourceTest& StudySummary::test(std::string_view category, Source model) const {
    for (const auto& t : tests) {
        if (t.category == category && t.model == model) return t;
    }
    throw StudyError(StudyErrc::NoData, std::string(category) + "/" + source_label(model));
}

std::string format_mean_sd(double mean, double sd) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, sd);
    return buf;
}

StudySummary summarize_study(std::span<const Rating> ratings, std::span<const RatingSession> sessions,
                             double alpha) {
    std::map<std::string_view, const RatingSession*, std::less<>> by_id;
    for (const auto& s : sessions) by_id.emplace(s.session_id, &s);

    // scores[category][source]
    std::map<std::string_view, std::array<std::vector<double>, 3>> scores;
    for (const auto& r : ratings) {
        const auto it = by_id.find(r.session_id);
        const SessionItem* item = it == by_id.end() ? nullptr : it->second->find(r.item_id);
        if (item == nullptr) {
            throw StudyError(StudyErrc::UnknownItem, r.session_id + "/" + r.item_id);
        }
        for (const auto category : kCategories) {
            const auto s = r.scores.find(category);
            if (s == r.scores.end()) {
                throw StudyError(StudyErrc::IncompleteScores, "rating " + r.item_id + " lacks " + std::string(category));
            }
            scores[category][static_cast<std::size_t>(item->source)].push_back(s->second);
        }
    }

    StudySummary out;
    out.alpha = alpha;
    out.ratings = ratings.size();
    for (const auto category : kCategories) {
        const auto& per_source = scores[category];
        for (const auto source : kSources) {
            const auto& v = per_source[static_cast<std::size_t>(source)];
            if (v.empty()) {
                throw StudyError(StudyErrc::NoData,
                                 "no " + std::string(category) + " ratings for " + source_label(source));
            }
            const auto n = static_cast<double>(v.size());
            double mean = 0.0;
            for (const double x : v) mean += x;
            mean /= n;
            double ss = 0.0;
            for (const double x : v) ss += (x - mean) * (x - mean);
            const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            out.cells.push_back({std::string(category), source, v.size(), mean, sd});
        }
        const auto& real = per_source[static_cast<std::size_t>(Source::Real)];
        for (const auto model : {Source::SDv1, Source::SDv2}) {
            const auto mw = mann_whitney_u(real, per_source[static_cast<std::size_t>(model)]);
            out.tests.push_back({std::string(category), model, mw.u, mw.p, mw.exact, mw.p < alpha});
        }
    }
    return out;
}

std::string render_summary(const StudySummary& summary) {
    std::ostringstream os;
    os << "Metrics";
    for (const auto s : kSources) os << '\t' << source_label(s);
    os << '\n';
    for (const auto category : kCategories) {
        os << category;
        for (const auto s : kSources) {
            const auto& c = summary.cell(category, s);
            os << '\t' << format_mean_sd(c.mean, c.sd);
        }
        os << '\n';
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "\nMann-Whitney U vs Real (two-sided, alpha = %.3g)\n", summary.alpha);
    os << buf << "Metrics\tSDv1 U\tSDv1 p\tSDv2 U\tSDv2 p\n";
    for (const auto category : kCategories) {
        os << category;
        for (const auto model : {Source::SDv1, Source::SDv2}) {
            const auto& t = summary.test(category, model);
            std::snprintf(buf, sizeof buf, "\t%.1f\t%.3f%s", t.u, t.p, t.significant ? "*" : "");
            os << buf;
        }
        os << '\n';
    }
    os << "\n* p < alpha. " << summary.ratings << " ratings pooled across raters.\n";
    return os.str();
}

}  // namespace nodulegen::study
