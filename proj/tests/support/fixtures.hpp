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

// Shared builders for test fixtures.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nodulegen/ingest/dicom.hpp"

namespace nodulegen::testing {

/// A slice with every pixel set to `raw_value`, hu filled in via rescale_to_hu.
inline ingest::DicomSlice uniform_slice(std::uint16_t rows, std::uint16_t cols,
                                        std::uint16_t raw_value, double slope, double intercept,
                                        double z = 0.0) {
    ingest::DicomSlice s;
    s.study_id = "1.2.3.4";
    s.series_id = "1.2.3.4.5";
    s.sop_id = "1.2.3.4.5.6";
    s.rows = rows;
    s.cols = cols;
    s.image_position = {-100.0, -120.5, z};
    s.z_position = z;
    s.pixel_spacing = {0.7, 0.7};
    s.rescale_slope = slope;
    s.rescale_intercept = intercept;
    s.raw.assign(std::size_t{rows} * cols, raw_value);
    s.hu = ingest::rescale_to_hu(s.raw, rows, cols, s.bits_stored, s.pixel_representation, slope,
                                 intercept);
    return s;
}

/// Decimal with at most three fractional digits, exactly representable as a
/// short DS string. Bounds are in thousandths.
inline double short_decimal(std::mt19937_64& rng, int lo_milli, int hi_milli) {
    std::uniform_int_distribution<int> milli(lo_milli, hi_milli);
    return milli(rng) / 1000.0;
}

inline ingest::DicomSlice random_slice(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 48);
    std::uniform_int_distribution<int> word(0, 0xFFFF);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> uid_part(1, 99999);
    const double slopes[] = {1.0, 0.5, 2.0, 1.25};
    const double intercepts[] = {-1024.0, -1000.0, 0.0, -1024.5, 12.25};

    ingest::DicomSlice s;
    s.study_id = "1.2.840." + std::to_string(uid_part(rng));
    s.series_id = s.study_id + "." + std::to_string(uid_part(rng));
    s.sop_id = s.series_id + "." + std::to_string(uid_part(rng));
    s.rows = static_cast<std::uint16_t>(dim(rng));
    s.cols = static_cast<std::uint16_t>(dim(rng));
    s.image_position = {short_decimal(rng, -250000, 250000), short_decimal(rng, -250000, 250000),
                        short_decimal(rng, -400000, 100000)};
    s.z_position = s.image_position[2];
    s.pixel_spacing = {short_decimal(rng, 250, 2250), short_decimal(rng, 250, 2250)};
    s.rescale_slope = slopes[std::uniform_int_distribution<int>(0, 3)(rng)];
    s.rescale_intercept = intercepts[std::uniform_int_distribution<int>(0, 4)(rng)];
    s.pixel_representation = static_cast<std::uint16_t>(coin(rng));
    s.bits_stored = coin(rng) ? 16 : 12;
    s.raw.resize(std::size_t{s.rows} * s.cols);
    for (auto& v : s.raw) v = static_cast<std::uint16_t>(word(rng));
    s.hu = ingest::rescale_to_hu(s.raw, s.rows, s.cols, s.bits_stored, s.pixel_representation,
                                 s.rescale_slope, s.rescale_intercept);
    return s;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
#ifdef NODULEGEN_TEST_TMP
    std::filesystem::path root(NODULEGEN_TEST_TMP);
#else
    std::filesystem::path root = std::filesystem::temp_directory_path() / "nodulegen-tests";
#endif
    auto dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace nodulegen::testing
