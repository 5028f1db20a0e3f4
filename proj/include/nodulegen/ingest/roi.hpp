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

#include "nodulegen/common/grid.hpp"
#include "nodulegen/ingest/consolidate.hpp"
#include "nodulegen/ingest/dicom.hpp"

namespace nodulegen::ingest {

struct NoduleRecord {
    std::string nodule_id;
    std::string series_id;
    std::string center_sop_id;
    std::vector<std::string> reader_ids;
    ScoreMap scores;
    std::array<double, 3> centroid{};  ///< x, y in pixels on the center slice; z in mm
    double center_slice_z = 0.0;
    double max_diameter_px = 0.0;
    std::size_t roi_side = 0;  ///< ceil(2 * max_diameter_px)
    std::array<long, 2> roi_origin{};  ///< (x, y) of the crop's top-left pixel
    Grid<std::int16_t> roi_hu;         ///< roi_side x roi_side, padded with slice minimum

    /// Malignancy score, or 0 when no reader supplied one.
    [[nodiscard]] int malignancy() const;
};

/// Largest Euclidean distance between any two points (O(n^2)).
[[nodiscard]] double max_pairwise_distance(std::span<const PixelPoint> points);

/// Crop side for a given diameter: ceil(2 * diameter).
[[nodiscard]] std::size_t roi_side_for(double max_diameter_px);

/// Builds the ROI for a consolidated group.
///
/// The center slice is the lower median of the group's distinct annotated z
/// positions. All inclusion contour points on that slice, across readers,
/// define the diameter and the centroid. Slices are matched by z within
/// `z_tolerance_mm`.
///
/// Throws EmptyContour when fewer than two distinct points lie on the center
/// slice, ZMismatch when no slice sits at the center z.
[[nodiscard]] NoduleRecord extract_roi(const NoduleGroup& group,
                                       std::span<const DicomSlice> slices,
                                       double z_tolerance_mm = 1e-3);

inline constexpr double kLungWindowLevel = -600.0;
inline constexpr double kLungWindowWidth = 1500.0;

/// Linear window [level - width/2, level + width/2] -> [0, 255], clamped,
/// rounded half-up.
[[nodiscard]] std::uint8_t window_value(double hu, double level, double width);

/// Keys cubic convolution (a = -0.5), pixel-center aligned, edge clamped.
[[nodiscard]] Grid<float> bicubic_resize(const Grid<float>& image, std::size_t out_rows,
                                         std::size_t out_cols);

/// Windows the ROI then resizes it to target x target.
[[nodiscard]] Grid<std::uint8_t> window_and_resize(const Grid<std::int16_t>& roi_hu,
                                                   double level, double width,
                                                   std::size_t target);
[[nodiscard]] Grid<std::uint8_t> window_and_resize(const NoduleRecord& record, double level,
                                                   double width, std::size_t target);

}  // namespace nodulegen::ingest
