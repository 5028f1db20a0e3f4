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

#include "nodulegen/ingest/consolidate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace nodulegen::ingest {

std::array<double, 3> annotation_centroid_mm(const ReaderAnnotation& annotation,
                                             std::array<double, 2> pixel_spacing) {
    std::array<double, 3> sum{};
    std::size_t count = 0;
    for (const auto& contour : annotation.contours) {
        if (!contour.inclusion) continue;
        for (const auto& p : contour.points) {
            // pixel_spacing is (row, column): y scales by the first entry.
            sum[0] += p.x * pixel_spacing[1];
            sum[1] += p.y * pixel_spacing[0];
            sum[2] += contour.z_position;
            ++count;
        }
    }
    if (count == 0) {
        return sum;
    }
    for (auto& v : sum) v /= static_cast<double>(count);
    return sum;
}

int median_half_up(std::vector<int> values) {
    if (values.empty()) {
        throw IngestError(IngestErrc::InvalidArgument, "median of empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    // (a + b) / 2 rounded half-up == floor((a + b + 1) / 2) for integers.
    const int sum = values[n / 2 - 1] + values[n / 2];
    return static_cast<int>(std::floor((sum + 1) / 2.0));
}

namespace {

struct DisjointSet {
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

auto member_key(const ReaderAnnotation& a) { return std::tie(a.reader_id, a.nodule_id); }

}  // namespace

std::vector<NoduleGroup> consolidate_readers(std::span<const ReaderAnnotation> annotations,
                                             double match_radius_mm,
                                             std::array<double, 2> pixel_spacing) {
    // Canonical order first so grouping and output ordering are independent of
    // the caller's ordering.
    std::vector<const ReaderAnnotation*> sorted;
    sorted.reserve(annotations.size());
    for (const auto& a : annotations) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* l, const auto* r) {
        return member_key(*l) < member_key(*r);
    });

    std::vector<std::array<double, 3>> centroids;
    centroids.reserve(sorted.size());
    for (const auto* a : sorted) centroids.push_back(annotation_centroid_mm(*a, pixel_spacing));

    DisjointSet sets(sorted.size());
    const double r2 = match_radius_mm * match_radius_mm;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double d = centroids[i][k] - centroids[j][k];
                d2 += d * d;
            }
            if (d2 <= r2) sets.unite(i, j);
        }
    }

    // Roots are the minimum index of each component, so iterating in index
    // order yields groups ordered by their first member.
    std::vector<NoduleGroup> groups;
    std::vector<std::size_t> group_of(sorted.size(), SIZE_MAX);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto root = sets.find(i);
        if (group_of[root] == SIZE_MAX) {
            group_of[root] = groups.size();
            groups.emplace_back();
        }
        auto& g = groups[group_of[root]];
        g.members.push_back(*sorted[i]);
        for (int k = 0; k < 3; ++k) g.centroid_mm[k] += centroids[i][k];
    }

    for (auto& g : groups) {
        for (auto& v : g.centroid_mm) v /= static_cast<double>(g.members.size());
        for (const auto c : kAllCharacteristics) {
            std::vector<int> values;
            for (const auto& m : g.members) {
                if (auto it = m.scores.find(c); it != m.scores.end()) values.push_back(it->second);
            }
            if (!values.empty()) g.scores[c] = median_half_up(std::move(values));
        }
    }
    return groups;
}

}  // namespace nodulegen::ingest
