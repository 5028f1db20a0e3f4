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

#include "nodulegen/ingest/dicom.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string_view>

#include "nodulegen/common/binary_io.hpp"

namespace nodulegen::ingest {

const char* code_name(IngestErrc code) noexcept {
    switch (code) {
        case IngestErrc::MissingTag: return "MissingTag";
        case IngestErrc::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
        case IngestErrc::TruncatedPixelData: return "TruncatedPixelData";
        case IngestErrc::MalformedElement: return "MalformedElement";
        case IngestErrc::UnsupportedPixelFormat: return "UnsupportedPixelFormat";
        case IngestErrc::MalformedXml: return "MalformedXml";
        case IngestErrc::ScoreOutOfRange: return "ScoreOutOfRange";
        case IngestErrc::EmptyContour: return "EmptyContour";
        case IngestErrc::ZMismatch: return "ZMismatch";
        case IngestErrc::InvalidArgument: return "InvalidArgument";
    }
    return "IngestError";
}

namespace {

constexpr std::size_t kPreambleSize = 128;
constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr Tag kItem = 0xFFFEE000;
constexpr Tag kItemDelimiter = 0xFFFEE00D;
constexpr Tag kSequenceDelimiter = 0xFFFEE0DD;
constexpr const char* kImplementationUid = "1.3.6.1.4.1.55555.7.1";

const std::map<Tag, const char*>& tag_names() {
    static const std::map<Tag, const char*> names{
        {tags::TransferSyntaxUid, "TransferSyntaxUID"},
        {tags::SopClassUid, "SOPClassUID"},
        {tags::SopInstanceUid, "SOPInstanceUID"},
        {tags::StudyInstanceUid, "StudyInstanceUID"},
        {tags::SeriesInstanceUid, "SeriesInstanceUID"},
        {tags::ImagePositionPatient, "ImagePositionPatient"},
        {tags::SamplesPerPixel, "SamplesPerPixel"},
        {tags::Rows, "Rows"},
        {tags::Columns, "Columns"},
        {tags::PixelSpacing, "PixelSpacing"},
        {tags::BitsAllocated, "BitsAllocated"},
        {tags::BitsStored, "BitsStored"},
        {tags::PixelRepresentation, "PixelRepresentation"},
        {tags::RescaleIntercept, "RescaleIntercept"},
        {tags::RescaleSlope, "RescaleSlope"},
        {tags::PixelData, "PixelData"},
    };
    return names;
}

bool has_long_length(std::string_view vr) {
    static constexpr std::string_view kLong[] = {"OB", "OD", "OF", "OL", "OV", "OW", "SQ",
                                                 "SV", "UC", "UN", "UR", "UT", "UV"};
    return std::find(std::begin(kLong), std::end(kLong), vr) != std::end(kLong);
}

struct Element {
    std::string vr;
    std::span<const std::uint8_t> value;
};

class DatasetReader {
public:
    explicit DatasetReader(std::span<const std::uint8_t> bytes) : reader_(bytes) {}

    bool at_end() const { return reader_.at_end(); }

    Tag read_tag() {
        const auto group = reader_.get<std::uint16_t>();
        const auto element = reader_.get<std::uint16_t>();
        return (static_cast<Tag>(group) << 16) | element;
    }

    // Reads one data element; sequences are consumed and returned with an
    // empty value.
    std::pair<Tag, Element> next() {
        try {
            const Tag tag = read_tag();
            if ((tag >> 16) == 0xFFFE) {
                throw IngestError(IngestErrc::MalformedElement,
                                  "unexpected delimiter " + tag_label(tag));
            }
            Element el;
            el.vr = reader_.get_string(2);
            if (!std::isupper(static_cast<unsigned char>(el.vr[0])) ||
                !std::isupper(static_cast<unsigned char>(el.vr[1]))) {
                throw IngestError(IngestErrc::UnsupportedTransferSyntax,
                                  "no explicit VR at " + tag_label(tag));
            }
            std::uint32_t length = 0;
            if (has_long_length(el.vr)) {
                reader_.skip(2);
                length = reader_.get<std::uint32_t>();
            } else {
                length = reader_.get<std::uint16_t>();
            }
            if (length == kUndefinedLength) {
                if (el.vr == "SQ") {
                    skip_undefined_sequence();
                    return {tag, el};
                }
                if (tag == tags::PixelData) {
                    throw IngestError(IngestErrc::UnsupportedTransferSyntax,
                                      "encapsulated pixel data");
                }
                throw IngestError(IngestErrc::MalformedElement,
                                  "undefined length on " + tag_label(tag));
            }
            if (length > reader_.remaining()) {
                if (tag == tags::PixelData) {
                    throw IngestError(IngestErrc::TruncatedPixelData,
                                      "declared " + std::to_string(length) + " bytes, " +
                                          std::to_string(reader_.remaining()) + " present");
                }
                throw IngestError(IngestErrc::MalformedElement,
                                  "length overruns file at " + tag_label(tag));
            }
            el.value = reader_.get_bytes(length);
            return {tag, el};
        } catch (const ShortRead& e) {
            throw IngestError(IngestErrc::MalformedElement, e.what());
        }
    }

private:
    void skip_undefined_sequence() {
        for (;;) {
            const Tag tag = read_tag();
            const auto length = reader_.get<std::uint32_t>();
            if (tag == kSequenceDelimiter) {
                return;
            }
            if (tag != kItem) {
                throw IngestError(IngestErrc::MalformedElement,
                                  "expected item in sequence, got " + tag_label(tag));
            }
            if (length != kUndefinedLength) {
                reader_.skip(length);
                continue;
            }
            skip_undefined_item();
        }
    }

    void skip_undefined_item() {
        for (;;) {
            const auto mark = reader_.position();
            const Tag tag = read_tag();
            if (tag == kItemDelimiter) {
                reader_.skip(4);
                return;
            }
            reader_.seek(mark);
            (void)next();
        }
    }

    ByteReader reader_;
};

std::string_view trimmed(std::span<const std::uint8_t> value) {
    std::string_view s(reinterpret_cast<const char*>(value.data()), value.size());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    return s;
}

std::vector<double> parse_decimals(Tag tag, std::span<const std::uint8_t> value) {
    std::vector<double> out;
    std::string_view s = trimmed(value);
    while (true) {
        const auto sep = s.find('\\');
        std::string_view part = s.substr(0, sep);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        if (!part.empty() && part.front() == '+') part.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            throw IngestError(IngestErrc::MalformedElement,
                              "bad decimal string in " + tag_label(tag));
        }
        out.push_back(v);
        if (sep == std::string_view::npos) break;
        s.remove_prefix(sep + 1);
    }
    return out;
}

class ElementMap {
public:
    void insert(Tag tag, Element el) { elements_[tag] = std::move(el); }

    const Element& require(Tag tag) const {
        auto it = elements_.find(tag);
        if (it == elements_.end()) {
            throw IngestError(IngestErrc::MissingTag, tag_label(tag));
        }
        return it->second;
    }
    bool contains(Tag tag) const { return elements_.count(tag) != 0; }

    std::uint16_t us(Tag tag) const {
        const auto& el = require(tag);
        if (el.value.size() < 2) {
            throw IngestError(IngestErrc::MalformedElement, "short US in " + tag_label(tag));
        }
        std::uint16_t v;
        std::memcpy(&v, el.value.data(), 2);
        return v;
    }
    std::string text(Tag tag) const { return std::string(trimmed(require(tag).value)); }
    std::vector<double> decimals(Tag tag, std::size_t expected) const {
        auto v = parse_decimals(tag, require(tag).value);
        if (v.size() != expected) {
            throw IngestError(IngestErrc::MalformedElement,
                              tag_label(tag) + " has " + std::to_string(v.size()) +
                                  " values, expected " + std::to_string(expected));
        }
        return v;
    }

private:
    std::map<Tag, Element> elements_;
};

void put_element(ByteWriter& w, Tag tag, std::string_view vr, std::span<const std::uint8_t> value) {
    w.put(static_cast<std::uint16_t>(tag >> 16));
    w.put(static_cast<std::uint16_t>(tag & 0xFFFF));
    w.put_string(vr);
    if (has_long_length(vr)) {
        w.put(std::uint16_t{0});
        w.put(static_cast<std::uint32_t>(value.size()));
    } else {
        w.put(static_cast<std::uint16_t>(value.size()));
    }
    w.put_bytes(value);
}

std::vector<std::uint8_t> padded_text(std::string_view text, char pad) {
    std::vector<std::uint8_t> v(text.begin(), text.end());
    if (v.size() % 2 != 0) {
        v.push_back(static_cast<std::uint8_t>(pad));
    }
    return v;
}

std::vector<std::uint8_t> us_bytes(std::uint16_t value) {
    return {static_cast<std::uint8_t>(value & 0xFF), static_cast<std::uint8_t>(value >> 8)};
}

std::string decimal_list(std::span<const double> values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) s += '\\';
        const auto v = format_decimal(values[i]);
        if (v.size() > 16) {
            throw IngestError(IngestErrc::InvalidArgument,
                              "decimal " + v + " exceeds DS length limit");
        }
        s += v;
    }
    return s;
}

}  // namespace

std::string tag_label(Tag tag) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "(%04X,%04X)", static_cast<unsigned>(tag >> 16),
                  static_cast<unsigned>(tag & 0xFFFF));
    std::string label(buf);
    const auto& names = tag_names();
    if (auto it = names.find(tag); it != names.end()) {
        label += ' ';
        label += it->second;
    }
    return label;
}

std::string format_decimal(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

Grid<std::int16_t> rescale_to_hu(std::span<const std::uint16_t> raw, std::uint16_t rows,
                                 std::uint16_t cols, std::uint16_t bits_stored,
                                 std::uint16_t pixel_representation, double slope,
                                 double intercept) {
    const std::uint32_t mask = bits_stored >= 16 ? 0xFFFFu : ((1u << bits_stored) - 1u);
    const std::int32_t sign_bit = bits_stored >= 16 ? 0x8000 : (1 << (bits_stored - 1));
    Grid<std::int16_t> hu(rows, cols);
    auto out = hu.values();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::int32_t stored = static_cast<std::int32_t>(raw[i] & mask);
        if (pixel_representation == 1 && (stored & sign_bit) != 0) {
            stored -= 2 * sign_bit;
        }
        const double value = std::round(stored * slope + intercept);
        out[i] = static_cast<std::int16_t>(std::clamp(
            value, static_cast<double>(std::numeric_limits<std::int16_t>::min()),
            static_cast<double>(std::numeric_limits<std::int16_t>::max())));
    }
    return hu;
}

DicomSlice parse_dicom_slice(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPreambleSize + 4 ||
        std::string_view(reinterpret_cast<const char*>(bytes.data() + kPreambleSize), 4) !=
            "DICM") {
        throw IngestError(IngestErrc::UnsupportedTransferSyntax,
                          "no Part-10 preamble; transfer syntax unknown");
    }
    const auto body = bytes.subspan(kPreambleSize + 4);
    DatasetReader reader(body);

    ElementMap elements;
    bool meta_done = false;
    while (!reader.at_end()) {
        auto [tag, el] = reader.next();
        if (!meta_done && (tag >> 16) != 0x0002) {
            meta_done = true;
            if (!elements.contains(tags::TransferSyntaxUid)) {
                throw IngestError(IngestErrc::MissingTag, tag_label(tags::TransferSyntaxUid));
            }
            if (const auto ts = elements.text(tags::TransferSyntaxUid);
                ts != kExplicitVrLittleEndian) {
                throw IngestError(IngestErrc::UnsupportedTransferSyntax, ts);
            }
        }
        elements.insert(tag, std::move(el));
    }
    if (!meta_done) {
        throw IngestError(IngestErrc::MissingTag, tag_label(tags::PixelData));
    }

    DicomSlice slice;
    slice.rows = elements.us(tags::Rows);
    slice.cols = elements.us(tags::Columns);
    const auto bits_allocated = elements.us(tags::BitsAllocated);
    slice.pixel_representation = elements.us(tags::PixelRepresentation);
    const auto slope = elements.decimals(tags::RescaleSlope, 1);
    const auto intercept = elements.decimals(tags::RescaleIntercept, 1);
    const auto position = elements.decimals(tags::ImagePositionPatient, 3);
    const auto spacing = elements.decimals(tags::PixelSpacing, 2);
    const auto& pixels = elements.require(tags::PixelData);
    slice.sop_id = elements.text(tags::SopInstanceUid);
    slice.series_id = elements.text(tags::SeriesInstanceUid);
    if (elements.contains(tags::StudyInstanceUid)) {
        slice.study_id = elements.text(tags::StudyInstanceUid);
    }
    if (elements.contains(tags::SopClassUid)) {
        slice.sop_class_id = elements.text(tags::SopClassUid);
    }
    slice.bits_stored =
        elements.contains(tags::BitsStored) ? elements.us(tags::BitsStored) : bits_allocated;

    if (bits_allocated != 16 || slice.bits_stored == 0 || slice.bits_stored > 16) {
        throw IngestError(IngestErrc::UnsupportedPixelFormat,
                          "bits allocated " + std::to_string(bits_allocated) + ", stored " +
                              std::to_string(slice.bits_stored));
    }
    if (elements.contains(tags::SamplesPerPixel) && elements.us(tags::SamplesPerPixel) != 1) {
        throw IngestError(IngestErrc::UnsupportedPixelFormat, "multi-sample pixels");
    }
    if (slice.pixel_representation > 1) {
        throw IngestError(IngestErrc::UnsupportedPixelFormat, "pixel representation");
    }
    if (slice.rows == 0 || slice.cols == 0) {
        throw IngestError(IngestErrc::MalformedElement, "zero image dimension");
    }
    if (spacing[0] <= 0.0 || spacing[1] <= 0.0) {
        throw IngestError(IngestErrc::MalformedElement, "non-positive pixel spacing");
    }
    const std::size_t count = std::size_t{slice.rows} * slice.cols;
    if (pixels.value.size() < count * 2) {
        throw IngestError(IngestErrc::TruncatedPixelData,
                          "need " + std::to_string(count * 2) + " bytes, have " +
                              std::to_string(pixels.value.size()));
    }

    slice.rescale_slope = slope[0];
    slice.rescale_intercept = intercept[0];
    slice.image_position = {position[0], position[1], position[2]};
    slice.z_position = position[2];
    slice.pixel_spacing = {spacing[0], spacing[1]};
    slice.raw.resize(count);
    std::memcpy(slice.raw.data(), pixels.value.data(), count * 2);
    slice.hu = rescale_to_hu(slice.raw, slice.rows, slice.cols, slice.bits_stored,
                             slice.pixel_representation, slice.rescale_slope,
                             slice.rescale_intercept);
    return slice;
}

std::vector<std::uint8_t> write_dicom_slice(const DicomSlice& slice,
                                            const DicomWriteOptions& options) {
    const std::size_t count = std::size_t{slice.rows} * slice.cols;
    if (slice.raw.size() != count) {
        throw IngestError(IngestErrc::InvalidArgument, "raw pixel count does not match rows*cols");
    }
    auto keep = [&](Tag tag) { return options.omit.count(tag) == 0; };
    auto text_el = [&](ByteWriter& w, Tag tag, std::string_view vr, std::string_view text,
                       char pad) {
        if (keep(tag)) put_element(w, tag, vr, padded_text(text, pad));
    };
    auto us_el = [&](ByteWriter& w, Tag tag, std::uint16_t value) {
        if (keep(tag)) put_element(w, tag, "US", us_bytes(value));
    };

    ByteWriter meta;
    if (keep(tags::FileMetaVersion)) {
        const std::uint8_t version[] = {0x00, 0x01};
        put_element(meta, tags::FileMetaVersion, "OB", version);
    }
    text_el(meta, tags::MediaStorageSopClassUid, "UI", slice.sop_class_id, '\0');
    text_el(meta, tags::MediaStorageSopInstanceUid, "UI", slice.sop_id, '\0');
    text_el(meta, tags::TransferSyntaxUid, "UI", options.transfer_syntax, '\0');
    text_el(meta, tags::ImplementationClassUid, "UI", kImplementationUid, '\0');

    ByteWriter out;
    out.bytes().assign(kPreambleSize, 0);
    out.put_string("DICM");
    const auto group_length = static_cast<std::uint32_t>(meta.size());
    std::uint8_t gl[4];
    std::memcpy(gl, &group_length, 4);
    put_element(out, tags::FileMetaGroupLength, "UL", gl);
    out.put_bytes(meta.bytes());

    text_el(out, tags::SopClassUid, "UI", slice.sop_class_id, '\0');
    text_el(out, tags::SopInstanceUid, "UI", slice.sop_id, '\0');
    text_el(out, tags::Modality, "CS", "CT", ' ');
    text_el(out, tags::StudyInstanceUid, "UI", slice.study_id, '\0');
    text_el(out, tags::SeriesInstanceUid, "UI", slice.series_id, '\0');
    text_el(out, tags::ImagePositionPatient, "DS", decimal_list(slice.image_position), ' ');
    us_el(out, tags::SamplesPerPixel, 1);
    text_el(out, tags::PhotometricInterpretation, "CS", "MONOCHROME2", ' ');
    us_el(out, tags::Rows, slice.rows);
    us_el(out, tags::Columns, slice.cols);
    text_el(out, tags::PixelSpacing, "DS", decimal_list(slice.pixel_spacing), ' ');
    us_el(out, tags::BitsAllocated, 16);
    us_el(out, tags::BitsStored, slice.bits_stored);
    us_el(out, tags::HighBit, static_cast<std::uint16_t>(slice.bits_stored - 1));
    us_el(out, tags::PixelRepresentation, slice.pixel_representation);
    const double intercept = slice.rescale_intercept;
    const double slope = slice.rescale_slope;
    text_el(out, tags::RescaleIntercept, "DS", decimal_list(std::span(&intercept, 1)), ' ');
    text_el(out, tags::RescaleSlope, "DS", decimal_list(std::span(&slope, 1)), ' ');
    if (keep(tags::PixelData)) {
        std::span<const std::uint8_t> pixel_bytes(
            reinterpret_cast<const std::uint8_t*>(slice.raw.data()), count * 2);
        put_element(out, tags::PixelData, "OW", pixel_bytes);
    }
    return std::move(out).take();
}

}  // namespace nodulegen::ingest
