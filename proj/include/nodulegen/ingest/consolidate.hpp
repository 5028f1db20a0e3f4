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
#include <span>
#include <string>
#include <vector>

#include "nodulegen/ingest/lidc_xml.hpp"

namespace nodulegen::ingest {

/// Readers' annotations judged to describe the same physical nodule.
struct NoduleGroup {
    std::vector<ReaderAnnotation> members;  ///< sorted by (reader_id, nodule_id)
    ScoreMap scores;                        ///< per-characteristic median, rounded half-up
    std::array<double, 3> centroid_mm{};    ///< mean of member centroids
};

/// Mean of all inclusion contour points, in mm (x, y scaled by pixel spacing).
[[nodiscard]] std::array<double, 3> annotation_centroid_mm(const ReaderAnnotation& annotation,
                                                           std::array<double, 2> pixel_spacing);

/// Median with even-count midpoints rounded half-up, e.g. {3,4} -> 4.
[[nodiscard]] int median_half_up(std::vector<int> values);

inline constexpr double kDefaultMatchRadiusMm = 5.0;

/// Groups annotations from one CT series by single-linkage on 3-D centroid
/// distance (<= match_radius_mm). The result does not depend on input order.
[[nodiscard]] std::vector<NoduleGroup> consolidate_readers(
    std::span<const ReaderAnnotation> annotations, double match_radius_mm = kDefaultMatchRadiusMm,
    std::array<double, 2> pixel_spacing = {1.0, 1.0});

}  // namespace nodulegen::ingest
