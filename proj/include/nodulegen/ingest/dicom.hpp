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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nodulegen/common/error.hpp"
#include "nodulegen/common/grid.hpp"

namespace nodulegen::ingest {

enum class IngestErrc {
    MissingTag,
    UnsupportedTransferSyntax,
    TruncatedPixelData,
    MalformedElement,
    UnsupportedPixelFormat,
    MalformedXml,
    ScoreOutOfRange,
    EmptyContour,
    ZMismatch,
    InvalidArgument,
};

[[nodiscard]] const char* code_name(IngestErrc code) noexcept;

using IngestError = Error<IngestErrc>;

/// DICOM (group, element) packed as group << 16 | element.
using Tag = std::uint32_t;

namespace tags {
inline constexpr Tag FileMetaGroupLength = 0x00020000;
inline constexpr Tag FileMetaVersion = 0x00020001;
inline constexpr Tag MediaStorageSopClassUid = 0x00020002;
inline constexpr Tag MediaStorageSopInstanceUid = 0x00020003;
inline constexpr Tag TransferSyntaxUid = 0x00020010;
inline constexpr Tag ImplementationClassUid = 0x00020012;
inline constexpr Tag SopClassUid = 0x00080016;
inline constexpr Tag SopInstanceUid = 0x00080018;
inline constexpr Tag Modality = 0x00080060;
inline constexpr Tag StudyInstanceUid = 0x0020000D;
inline constexpr Tag SeriesInstanceUid = 0x0020000E;
inline constexpr Tag ImagePositionPatient = 0x00200032;
inline constexpr Tag SamplesPerPixel = 0x00280002;
inline constexpr Tag PhotometricInterpretation = 0x00280004;
inline constexpr Tag Rows = 0x00280010;
inline constexpr Tag Columns = 0x00280011;
inline constexpr Tag PixelSpacing = 0x00280030;
inline constexpr Tag BitsAllocated = 0x00280100;
inline constexpr Tag BitsStored = 0x00280101;
inline constexpr Tag HighBit = 0x00280102;
inline constexpr Tag PixelRepresentation = 0x00280103;
inline constexpr Tag RescaleIntercept = 0x00281052;
inline constexpr Tag RescaleSlope = 0x00281053;
inline constexpr Tag PixelData = 0x7FE00010;
}  // namespace tags

/// "(0028,0030) PixelSpacing" style label used in error messages.
[[nodiscard]] std::string tag_label(Tag tag);

inline constexpr const char* kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";
inline constexpr const char* kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";

/// One CT slice in the supported subset: explicit VR little endian,
/// uncompressed, 16 bits allocated, single sample per pixel.
struct DicomSlice {
    std::string sop_class_id = kCtImageStorage;
    std::string study_id;
    std::string series_id;
    std::string sop_id;
    std::uint16_t rows = 0;
    std::uint16_t cols = 0;
    std::array<double, 3> image_position{};  ///< mm, patient coordinates
    double z_position = 0.0;                  ///< image_position[2]
    std::array<double, 2> pixel_spacing{};   ///< mm: (row spacing, column spacing)
    double rescale_slope = 1.0;
    double rescale_intercept = 0.0;
    std::uint16_t bits_stored = 16;
    std::uint16_t pixel_representation = 0;  ///< 0 unsigned, 1 two's complement
    std::vector<std::uint16_t> raw;           ///< stored pixel words, row-major
    Grid<std::int16_t> hu;                    ///< raw * slope + intercept, saturated

    friend bool operator==(const DicomSlice&, const DicomSlice&) = default;
};

/// HU = stored value * slope + intercept, rounded to nearest and saturated to int16.
[[nodiscard]] Grid<std::int16_t> rescale_to_hu(std::span<const std::uint16_t> raw,
                                               std::uint16_t rows, std::uint16_t cols,
                                               std::uint16_t bits_stored,
                                               std::uint16_t pixel_representation,
                                               double slope, double intercept);

/// Parses a Part-10 file (128-byte preamble + "DICM" + file meta group).
///
/// Sequences in the data set are skipped, both defined and undefined length.
/// Throws IngestError with MissingTag, UnsupportedTransferSyntax,
/// TruncatedPixelData, MalformedElement or UnsupportedPixelFormat.
[[nodiscard]] DicomSlice parse_dicom_slice(std::span<const std::uint8_t> bytes);

struct DicomWriteOptions {
    std::set<Tag> omit;  ///< tags left out, for building error fixtures
    std::string transfer_syntax = kExplicitVrLittleEndian;
};

/// Serializes `slice` from its raw pixel words; `hu` is not consulted.
[[nodiscard]] std::vector<std::uint8_t> write_dicom_slice(const DicomSlice& slice,
                                                          const DicomWriteOptions& options = {});

/// Shortest round-trip decimal string used for DS values.
[[nodiscard]] std::string format_decimal(double value);

}  // namespace nodulegen::ingest
