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

#include "nodulegen/dataset/split.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "nodulegen/common/random.hpp"

namespace nodulegen::dataset {

const char* code_name(DatasetErrc code) noexcept {
    switch (code) {
        case DatasetErrc::EmptyInput: return "EmptyInput";
        case DatasetErrc::InvalidStratum: return "InvalidStratum";
        case DatasetErrc::InvalidRatios: return "InvalidRatios";
        case DatasetErrc::NonSquareImage: return "NonSquareImage";
        case DatasetErrc::MissingImage: return "MissingImage";
        case DatasetErrc::InvalidEntry: return "InvalidEntry";
    }
    return "DatasetError";
}

const char* split_name(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    for (const auto s : kAllSplits) {
        if (name == split_name(s)) return s;
    }
    throw DatasetError(DatasetErrc::InvalidEntry, "unknown split '" + name + "'");
}

SplitRatios parse_ratios(const std::string& text) {
    SplitRatios ratios;
    std::istringstream in(text);
    std::string part;
    std::size_t i = 0;
    while (std::getline(in, part, ':')) {
        if (i >= 3) {
            throw DatasetError(DatasetErrc::InvalidRatios, "expected three parts, got '" + text + "'");
        }
        try {
            std::size_t used = 0;
            const long v = std::stol(part, &used);
            if (used != part.size() || v < 0) throw std::invalid_argument(part);
            ratios.parts[i] = static_cast<unsigned>(v);
        } catch (const std::exception&) {
            throw DatasetError(DatasetErrc::InvalidRatios, "'" + text + "'");
        }
        ++i;
    }
    if (i != 3 || !in.eof() || std::accumulate(ratios.parts.begin(), ratios.parts.end(), 0u) == 0) {
        throw DatasetError(DatasetErrc::InvalidRatios, "expected train:val:test, got '" + text + "'");
    }
    return ratios;
}

std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& ratios) {
    const std::uint64_t total = std::accumulate(ratios.parts.begin(), ratios.parts.end(), 0ull);
    if (total == 0) {
        throw DatasetError(DatasetErrc::InvalidRatios, "ratios sum to zero");
    }
    std::array<std::size_t, 3> counts{};
    std::array<std::uint64_t, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        // Exact integer arithmetic: n * part = counts * total + remainder.
        const std::uint64_t scaled = static_cast<std::uint64_t>(n) * ratios.parts[i];
        counts[i] = static_cast<std::size_t>(scaled / total);
        remainder[i] = scaled % total;
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
        ++counts[order[k]];
    }
    return counts;
}

std::vector<Split> stratified_split(std::span<const StratumItem> items, const SplitRatios& ratios,
                                    std::uint64_t seed) {
    if (items.empty()) {
        throw DatasetError(DatasetErrc::EmptyInput, "nothing to split");
    }
    std::map<int, std::vector<std::size_t>> strata;
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!seen.insert(items[i].id).second) {
            throw DatasetError(DatasetErrc::InvalidEntry, "duplicate id " + items[i].id);
        }
        if (items[i].stratum < 1 || items[i].stratum > 5) {
            throw DatasetError(DatasetErrc::InvalidStratum,
                               items[i].id + " has malignancy " + std::to_string(items[i].stratum));
        }
        strata[items[i].stratum].push_back(i);
    }

    std::vector<Split> assignment(items.size(), Split::Train);
    for (auto& [stratum, members] : strata) {
        std::sort(members.begin(), members.end(),
                  [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(stratum)));
        seeded_shuffle(std::span(members), rng);
        const auto counts = allocate_counts(members.size(), ratios);
        std::size_t pos = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            for (std::size_t k = 0; k < counts[s]; ++k) {
                assignment[members[pos++]] = kAllSplits[s];
            }
        }
    }
    return assignment;
}

}  // namespace nodulegen::dataset
