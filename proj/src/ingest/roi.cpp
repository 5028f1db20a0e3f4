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

#include "nodulegen/ingest/roi.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nodulegen::ingest {

int NoduleRecord::malignancy() const {
    auto it = scores.find(Characteristic::Malignancy);
    return it == scores.end() ? 0 : it->second;
}

double max_pairwise_distance(std::span<const PixelPoint> points) {
    double best2 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double dx = points[i].x - points[j].x;
            const double dy = points[i].y - points[j].y;
            best2 = std::max(best2, dx * dx + dy * dy);
        }
    }
    return std::sqrt(best2);
}

std::size_t roi_side_for(double max_diameter_px) {
    return static_cast<std::size_t>(std::ceil(2.0 * max_diameter_px));
}

NoduleRecord extract_roi(const NoduleGroup& group, std::span<const DicomSlice> slices,
                         double z_tolerance_mm) {
    if (group.members.empty()) {
        throw IngestError(IngestErrc::EmptyContour, "group has no members");
    }
    std::vector<double> zs;
    for (const auto& m : group.members) {
        for (const auto& c : m.contours) {
            if (c.inclusion && !c.points.empty()) zs.push_back(c.z_position);
        }
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end(),
                         [&](double a, double b) { return std::abs(a - b) <= z_tolerance_mm; }),
             zs.end());
    const auto& first = group.members.front();
    if (zs.empty()) {
        throw IngestError(IngestErrc::EmptyContour, "no inclusion contours for " + first.nodule_id);
    }
    const double center_z = zs[(zs.size() - 1) / 2];

    std::vector<PixelPoint> points;
    for (const auto& m : group.members) {
        for (const auto& c : m.contours) {
            if (c.inclusion && std::abs(c.z_position - center_z) <= z_tolerance_mm) {
                points.insert(points.end(), c.points.begin(), c.points.end());
            }
        }
    }
    const double diameter = max_pairwise_distance(points);
    if (points.size() < 2 || diameter == 0.0) {
        throw IngestError(IngestErrc::EmptyContour,
                          "diameter undefined for " + first.nodule_id + " at z=" +
                              format_decimal(center_z));
    }

    const DicomSlice* slice = nullptr;
    for (const auto& s : slices) {
        if (std::abs(s.z_position - center_z) <= z_tolerance_mm) {
            slice = &s;
            break;
        }
    }
    if (slice == nullptr) {
        throw IngestError(IngestErrc::ZMismatch,
                          "no slice at z=" + format_decimal(center_z) + " for " + first.nodule_id);
    }

    NoduleRecord record;
    record.nodule_id = first.nodule_id;
    record.series_id = slice->series_id;
    record.center_sop_id = slice->sop_id;
    for (const auto& m : group.members) record.reader_ids.push_back(m.reader_id);
    record.scores = group.scores;
    record.center_slice_z = center_z;
    record.max_diameter_px = diameter;

    double cx = 0.0;
    double cy = 0.0;
    for (const auto& p : points) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(points.size());
    cy /= static_cast<double>(points.size());
    record.centroid = {cx, cy, center_z};

    const std::size_t side = roi_side_for(diameter);
    const double half = static_cast<double>(side) / 2.0;
    const long x0 = static_cast<long>(std::floor(cx - half + 0.5));
    const long y0 = static_cast<long>(std::floor(cy - half + 0.5));
    record.roi_side = side;
    record.roi_origin = {x0, y0};

    const auto hu_values = slice->hu.values();
    const std::int16_t pad = *std::min_element(hu_values.begin(), hu_values.end());
    record.roi_hu = Grid<std::int16_t>(side, side, pad);
    const long rows = static_cast<long>(slice->hu.rows());
    const long cols = static_cast<long>(slice->hu.cols());
    for (std::size_t r = 0; r < side; ++r) {
        const long y = y0 + static_cast<long>(r);
        if (y < 0 || y >= rows) continue;
        for (std::size_t c = 0; c < side; ++c) {
            const long x = x0 + static_cast<long>(c);
            if (x < 0 || x >= cols) continue;
            record.roi_hu(r, c) = slice->hu(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
        }
    }
    return record;
}

std::uint8_t window_value(double hu, double level, double width) {
    const double lo = level - width / 2.0;
    const double scaled = (hu - lo) / width * 255.0;
    return static_cast<std::uint8_t>(std::clamp(std::floor(scaled + 0.5), 0.0, 255.0));
}

namespace {

double keys_weight(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    return 0.0;
}

struct Taps {
    std::array<std::size_t, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> taps_for(std::size_t in, std::size_t out) {
    std::vector<Taps> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
        const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double pos = base - 1.0 + k;
            const double clamped = std::clamp(pos, 0.0, static_cast<double>(in - 1));
            taps[o].index[k] = static_cast<std::size_t>(clamped);
            taps[o].weight[k] = keys_weight(src - pos);
            total += taps[o].weight[k];
        }
        for (auto& w : taps[o].weight) w /= total;
    }
    return taps;
}

}  // namespace

Grid<float> bicubic_resize(const Grid<float>& image, std::size_t out_rows, std::size_t out_cols) {
    if (image.empty() || out_rows == 0 || out_cols == 0) {
        throw IngestError(IngestErrc::InvalidArgument, "empty resize");
    }
    const auto col_taps = taps_for(image.cols(), out_cols);
    const auto row_taps = taps_for(image.rows(), out_rows);

    Grid<float> horizontal(image.rows(), out_cols);
    for (std::size_t r = 0; r < image.rows(); ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k) v += col_taps[c].weight[k] * image(r, col_taps[c].index[k]);
            horizontal(r, c) = static_cast<float>(v);
        }
    }
    Grid<float> out(out_rows, out_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k) v += row_taps[r].weight[k] * horizontal(row_taps[r].index[k], c);
            out(r, c) = static_cast<float>(v);
        }
    }
    return out;
}

Grid<std::uint8_t> window_and_resize(const Grid<std::int16_t>& roi_hu, double level, double width,
                                     std::size_t target) {
    if (!(width > 0.0)) {
        throw IngestError(IngestErrc::InvalidArgument, "window width must be positive");
    }
    Grid<float> windowed(roi_hu.rows(), roi_hu.cols());
    for (std::size_t i = 0; i < roi_hu.size(); ++i) {
        windowed.values()[i] = window_value(roi_hu.values()[i], level, width);
    }
    const auto resized = bicubic_resize(windowed, target, target);
    Grid<std::uint8_t> out(target, target);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values()[i] = static_cast<std::uint8_t>(
            std::clamp(std::floor(resized.values()[i] + 0.5f), 0.0f, 255.0f));
    }
    return out;
}

Grid<std::uint8_t> window_and_resize(const NoduleRecord& record, double level, double width,
                                     std::size_t target) {
    return window_and_resize(record.roi_hu, level, width, target);
}

}  // namespace nodulegen::ingest
