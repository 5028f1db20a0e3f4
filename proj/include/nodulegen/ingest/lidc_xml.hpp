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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nodulegen/ingest/dicom.hpp"

namespace nodulegen::ingest {

/// LIDC characteristic names as they appear in the XML.
enum class Characteristic {
    Subtlety,
    InternalStructure,
    Calcification,
    Sphericity,
    Margin,
    Lobulation,
    Spiculation,
    Texture,
    Malignancy,
};

inline constexpr Characteristic kAllCharacteristics[] = {
    Characteristic::Subtlety,    Characteristic::InternalStructure, Characteristic::Calcification,
    Characteristic::Sphericity,  Characteristic::Margin,            Characteristic::Lobulation,
    Characteristic::Spiculation, Characteristic::Texture,           Characteristic::Malignancy,
};

[[nodiscard]] const char* characteristic_name(Characteristic c) noexcept;
/// Inclusive valid range; calcification runs 1-6, the rest 1-5.
[[nodiscard]] std::pair<int, int> characteristic_range(Characteristic c) noexcept;

using ScoreMap = std::map<Characteristic, int>;

struct PixelPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct Contour {
    double z_position = 0.0;  ///< mm
    std::string sop_id;
    bool inclusion = true;
    std::vector<PixelPoint> points;
};

struct ReaderAnnotation {
    std::string nodule_id;
    std::string reader_id;
    std::vector<Contour> contours;
    ScoreMap scores;
};

struct AnnotationWarning {
    std::string reader_id;
    std::string nodule_id;
    std::string message;
};

struct AnnotationFile {
    std::string series_id;  ///< ResponseHeader/SeriesInstanceUid when present
    std::vector<ReaderAnnotation> annotations;
    std::vector<AnnotationWarning> warnings;
};

/// Parses an LIDC read message. One annotation per (readingSession,
/// unblindedReadNodule) carrying a characteristics block; nodules without one
/// (the sub-3 mm class) or without contours are reported as warnings.
///
/// Throws IngestError{MalformedXml} or IngestError{ScoreOutOfRange}.
[[nodiscard]] AnnotationFile parse_annotation_xml(std::string_view xml);

}  // namespace nodulegen::ingest
