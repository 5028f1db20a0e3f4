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

#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "nodulegen/common/binary_io.hpp"
#include "nodulegen/ingest/dicom.hpp"
#include "../support/fixtures.hpp"

using namespace nodulegen;
using namespace nodulegen::ingest;

namespace {

IngestErrc parse_error(std::span<const std::uint8_t> bytes) {
    try {
        (void)parse_dicom_slice(bytes);
    } catch (const IngestError& e) {
        return e.code();
    }
    FAIL("parse succeeded");
    return IngestErrc::InvalidArgument;
}

// Offset of the first data-set element: preamble, magic, group-length element, meta group.
std::size_t dataset_offset(const std::vector<std::uint8_t>& bytes) {
    std::uint32_t group_length = 0;
    std::memcpy(&group_length, bytes.data() + 132 + 8, 4);
    return 132 + 12 + group_length;
}

void put_tag(ByteWriter& w, std::uint16_t group, std::uint16_t element) {
    w.put(group);
    w.put(element);
}

}  // namespace

TEST_CASE("uniform raw 1024 with intercept -1024 rescales to zero HU") {
    const auto slice = testing::uniform_slice(4, 4, 1024, 1.0, -1024.0);
    const auto parsed = parse_dicom_slice(write_dicom_slice(slice));
    CHECK(parsed.rows == 4);
    CHECK(parsed.cols == 4);
    for (const auto v : parsed.hu.values()) CHECK(v == 0);
}

TEST_CASE("identity rescale keeps stored values") {
    const auto parsed = parse_dicom_slice(write_dicom_slice(testing::uniform_slice(3, 5, 500, 1.0, 0.0)));
    for (const auto v : parsed.hu.values()) CHECK(v == 500);
}

TEST_CASE("signed storage and fractional slope") {
    auto slice = testing::uniform_slice(2, 2, 0xFC18, 1.0, 0.0);  // -1000 as int16
    slice.pixel_representation = 1;
    auto parsed = parse_dicom_slice(write_dicom_slice(slice));
    for (const auto v : parsed.hu.values()) CHECK(v == -1000);

    slice = testing::uniform_slice(1, 1, 3, 0.5, -1024.0);
    parsed = parse_dicom_slice(write_dicom_slice(slice));
    CHECK(parsed.hu(0, 0) == -1023);  // 1.5 - 1024 = -1022.5, rounded away from zero
}

TEST_CASE("12-bit signed storage sign-extends from bit 11") {
    auto slice = testing::uniform_slice(1, 2, 0, 1.0, 0.0);
    slice.pixel_representation = 1;
    slice.bits_stored = 12;
    slice.raw = {0x0FFF, 0xF7FF};  // -1, and +2047 with junk above bit 11
    const auto parsed = parse_dicom_slice(write_dicom_slice(slice));
    CHECK(parsed.hu(0, 0) == -1);
    CHECK(parsed.hu(0, 1) == 2047);
}

TEST_CASE("HU saturates at the int16 range") {
    const auto hu = rescale_to_hu(std::vector<std::uint16_t>{60000}, 1, 1, 16, 0, 1.0, 0.0);
    CHECK(hu(0, 0) == 32767);
}

TEST_CASE("missing required tags are reported by name") {
    const auto slice = testing::uniform_slice(4, 4, 1024, 1.0, -1024.0);
    for (const Tag tag : {tags::PixelSpacing, tags::RescaleSlope, tags::RescaleIntercept,
                          tags::ImagePositionPatient, tags::Rows, tags::Columns, tags::BitsAllocated,
                          tags::PixelRepresentation, tags::SopInstanceUid, tags::SeriesInstanceUid,
                          tags::PixelData}) {
        CAPTURE(tag_label(tag));
        try {
            (void)parse_dicom_slice(write_dicom_slice(slice, {.omit = {tag}}));
            FAIL("expected MissingTag");
        } catch (const IngestError& e) {
            CHECK(e.code() == IngestErrc::MissingTag);
            CHECK(std::string(e.what()).find(tag_label(tag)) != std::string::npos);
        }
    }
}

TEST_CASE("PixelSpacing label in the error message") {
    const auto bytes = write_dicom_slice(testing::uniform_slice(4, 4, 0, 1, 0), {.omit = {tags::PixelSpacing}});
    CHECK_THROWS_WITH_AS((void)parse_dicom_slice(bytes), "MissingTag: (0028,0030) PixelSpacing", IngestError);
}

TEST_CASE("transfer syntaxes other than explicit VR little endian are rejected") {
    const auto slice = testing::uniform_slice(4, 4, 0, 1.0, 0.0);
    CHECK(parse_error(write_dicom_slice(slice, {.omit = {}, .transfer_syntax = "1.2.840.10008.1.2"})) ==
          IngestErrc::UnsupportedTransferSyntax);
    CHECK(parse_error(write_dicom_slice(slice, {.omit = {}, .transfer_syntax = "1.2.840.10008.1.2.4.70"})) ==
          IngestErrc::UnsupportedTransferSyntax);

    auto no_preamble = write_dicom_slice(slice);
    no_preamble.erase(no_preamble.begin(), no_preamble.begin() + 132);
    CHECK(parse_error(no_preamble) == IngestErrc::UnsupportedTransferSyntax);
}

TEST_CASE("truncated pixel data") {
    const auto bytes = write_dicom_slice(testing::uniform_slice(8, 8, 7, 1.0, 0.0));
    // Chop inside the pixel block: declared length overruns the file.
    const std::vector<std::uint8_t> chopped(bytes.begin(), bytes.end() - 10);
    CHECK(parse_error(chopped) == IngestErrc::TruncatedPixelData);

    // Declared length consistent but too short for rows * cols.
    auto small = testing::uniform_slice(4, 4, 7, 1.0, 0.0);
    auto small_bytes = write_dicom_slice(small);
    // Patch Rows from 4 to 8 in place: search for the Rows element header.
    const std::uint8_t rows_header[] = {0x28, 0x00, 0x10, 0x00, 'U', 'S', 0x02, 0x00, 0x04, 0x00};
    auto it = std::search(small_bytes.begin(), small_bytes.end(), std::begin(rows_header), std::end(rows_header));
    REQUIRE(it != small_bytes.end());
    *(it + 8) = 0x08;
    CHECK(parse_error(small_bytes) == IngestErrc::TruncatedPixelData);
}

TEST_CASE("non-16-bit pixels are unsupported") {
    auto bytes = write_dicom_slice(testing::uniform_slice(2, 2, 7, 1.0, 0.0));
    const std::uint8_t header[] = {0x28, 0x00, 0x00, 0x01, 'U', 'S', 0x02, 0x00, 0x10, 0x00};
    auto it = std::search(bytes.begin(), bytes.end(), std::begin(header), std::end(header));
    REQUIRE(it != bytes.end());
    *(it + 8) = 0x08;
    CHECK(parse_error(bytes) == IngestErrc::UnsupportedPixelFormat);
}

TEST_CASE("sequences are skipped in both length forms") {
    const auto slice = testing::uniform_slice(3, 3, 1100, 1.0, -1024.0);
    auto bytes = write_dicom_slice(slice);

    ByteWriter sq;
    // (0008,1140) SQ, undefined length
    put_tag(sq, 0x0008, 0x1140);
    sq.put_string("SQ");
    sq.put(std::uint16_t{0});
    sq.put(std::uint32_t{0xFFFFFFFF});
    // item, undefined length, one nested element, item delimiter
    put_tag(sq, 0xFFFE, 0xE000);
    sq.put(std::uint32_t{0xFFFFFFFF});
    put_tag(sq, 0x0008, 0x1150);
    sq.put_string("UI");
    sq.put(std::uint16_t{4});
    sq.put_string("1.2");
    sq.put('\0');
    put_tag(sq, 0xFFFE, 0xE00D);
    sq.put(std::uint32_t{0});
    // item, defined length 6 (opaque bytes)
    put_tag(sq, 0xFFFE, 0xE000);
    sq.put(std::uint32_t{6});
    sq.put_string("abcdef");
    // sequence delimiter
    put_tag(sq, 0xFFFE, 0xE0DD);
    sq.put(std::uint32_t{0});
    // (0008,1115) SQ, defined length 4 of garbage
    put_tag(sq, 0x0008, 0x1115);
    sq.put_string("SQ");
    sq.put(std::uint16_t{0});
    sq.put(std::uint32_t{4});
    sq.put(std::uint32_t{0xDEADBEEF});

    const auto offset = dataset_offset(bytes);
    bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(offset), sq.bytes().begin(), sq.bytes().end());
    const auto parsed = parse_dicom_slice(bytes);
    CHECK(parsed == slice);
}

TEST_CASE("encapsulated pixel data is an unsupported transfer form") {
    auto bytes = write_dicom_slice(testing::uniform_slice(2, 2, 1, 1.0, 0.0));
    const std::uint8_t header[] = {0xE0, 0x7F, 0x10, 0x00, 'O', 'W', 0x00, 0x00};
    auto it = std::search(bytes.begin(), bytes.end(), std::begin(header), std::end(header));
    REQUIRE(it != bytes.end());
    const std::uint32_t undefined = 0xFFFFFFFF;
    std::memcpy(&*(it + 8), &undefined, 4);
    CHECK(parse_error(bytes) == IngestErrc::UnsupportedTransferSyntax);
}

TEST_CASE("writer rejects DS values that do not fit 16 characters") {
    auto slice = testing::uniform_slice(1, 1, 0, 1.0, 0.0);
    slice.image_position[0] = 0.1234567890123456;
    CHECK_THROWS_AS((void)write_dicom_slice(slice), IngestError);
}

TEST_CASE("write(parse(bytes)) reproduces the bytes for random fixtures") {
    std::mt19937_64 rng(20260101);
    for (int i = 0; i < 25; ++i) {
        const auto slice = testing::random_slice(rng);
        const auto bytes = write_dicom_slice(slice);
        const auto parsed = parse_dicom_slice(bytes);
        REQUIRE(parsed == slice);
        REQUIRE(write_dicom_slice(parsed) == bytes);
    }
}
