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

// Two-model metric grid, used as a report fixture.

#include <array>
#include <vector>

#include "nodulegen/metrics/report.hpp"

namespace nodulegen::testing {

inline constexpr std::array<double, 7> kReferenceScales{5, 10, 20, 30, 40, 50, 60};

struct ReferenceRow {
    const char* model;
    std::array<double, 7> fid, kid, lpips, clip, bioclip;
};

inline const std::array<ReferenceRow, 2>& reference_rows() {
    static const std::array<ReferenceRow, 2> rows{{
        {"SDv1",
         {114.04, 115.0, 132.2, 155.6, 184.0, 214.6, 240.5},
         {0.063, 0.059, 0.070, 0.089, 0.119, 0.154, 0.189},
         {0.449, 0.452, 0.461, 0.470, 0.483, 0.496, 0.508},
         {0.657, 0.644, 0.653, 0.656, 0.650, 0.644, 0.642},
         {0.835, 0.848, 0.801, 0.762, 0.736, 0.723, 0.718}},
        {"SDv2",
         {96.34, 103.1, 133.0, 202.9, 268.9, 308.7, 326.4},
         {0.038, 0.039, 0.056, 0.129, 0.208, 0.257, 0.280},
         {0.441, 0.449, 0.466, 0.480, 0.500, 0.525, 0.551},
         {0.663, 0.642, 0.587, 0.569, 0.568, 0.565, 0.562},
         {0.870, 0.854, 0.778, 0.726, 0.687, 0.643, 0.618}},
    }};
    return rows;
}

inline std::vector<metrics::ConfigMetrics> reference_configs() {
    std::vector<metrics::ConfigMetrics> out;
    for (const auto& row : reference_rows()) {
        for (std::size_t g = 0; g < kReferenceScales.size(); ++g) {
            metrics::MetricCell cell;
            cell.fid = row.fid[g];
            cell.kid_mean = row.kid[g];
            cell.lpips = row.lpips[g];
            cell.clipscore = row.clip[g];
            cell.bioclipscore = row.bioclip[g];
            out.push_back({row.model, kReferenceScales[g], cell});
        }
    }
    return out;
}

inline constexpr double kRealClipScore = 0.617;
inline constexpr double kRealBioClipScore = 0.840;

}  // namespace nodulegen::testing
