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
#include <span>
#include <string>
#include <vector>

#include "nodulegen/common/error.hpp"

namespace nodulegen::dataset {

enum class DatasetErrc {
    EmptyInput,
    InvalidStratum,
    InvalidRatios,
    NonSquareImage,
    MissingImage,
    InvalidEntry,
};

[[nodiscard]] const char* code_name(DatasetErrc code) noexcept;

using DatasetError = Error<DatasetErrc>;

enum class Split { Train, Val, Test };

inline constexpr Split kAllSplits[] = {Split::Train, Split::Val, Split::Test};

[[nodiscard]] const char* split_name(Split split) noexcept;
[[nodiscard]] Split parse_split(const std::string& name);

/// Integer weights for train:val:test.
struct SplitRatios {
    std::array<unsigned, 3> parts{7, 2, 1};
};

/// Parses "7:2:1". Throws DatasetError{InvalidRatios}.
[[nodiscard]] SplitRatios parse_ratios(const std::string& text);

/// Largest-remainder apportionment of n items; equal remainders favour the
/// earlier split (train, then val, then test).
[[nodiscard]] std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& ratios);

struct StratumItem {
    std::string id;  ///< unique key; defines the canonical order within a stratum
    int stratum = 0; ///< malignancy 1-5
};

/// Assigns a split to every item, apportioning each stratum independently.
/// Items within a stratum are ordered by id and then shuffled with a seed
/// derived from (seed, stratum), so the result does not depend on input order.
/// The returned vector is aligned with `items`.
[[nodiscard]] std::vector<Split> stratified_split(std::span<const StratumItem> items,
                                                  const SplitRatios& ratios, std::uint64_t seed);

}  // namespace nodulegen::dataset
