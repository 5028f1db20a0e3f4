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

#include <string>
#include <vector>

#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/ingest/consolidate.hpp"
#include "nodulegen/ingest/roi.hpp"

namespace nodulegen::ingest {

struct IngestOptions {
    double match_radius_mm = kDefaultMatchRadiusMm;
    double window_level = kLungWindowLevel;
    double window_width = kLungWindowWidth;
    std::size_t size = 512;
    std::string image_subdir = "images";  ///< relative to the manifest's directory
};

struct IngestReport {
    std::vector<json> records;        ///< manifest lines, also written to disk
    std::vector<std::string> warnings;
    std::size_t slices = 0;
    std::size_t annotation_files = 0;
};

/// One manifest line: nodule id, image path, scores keyed by XML name,
/// malignancy and provenance (series, center SOP, readers).
[[nodiscard]] json record_json(const NoduleRecord& record, const std::string& image_path);

/// Parses every DICOM file under `dicom_dir` and every .xml under `xml_dir`,
/// consolidates readers per series, crops and windows each nodule, and writes
/// the PNGs plus a JSON Lines manifest at `manifest_path`. Nodules that cannot
/// be cropped, and files that do not parse, become warnings.
IngestReport ingest_directories(const std::string& dicom_dir, const std::string& xml_dir,
                                const std::string& manifest_path, const IngestOptions& options = {});

}  // namespace nodulegen::ingest
