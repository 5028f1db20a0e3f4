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

#include "nodulegen/ingest/lidc_xml.hpp"

#include <charconv>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace nodulegen::ingest {

namespace pt = boost::property_tree;

const char* characteristic_name(Characteristic c) noexcept {
    switch (c) {
        case Characteristic::Subtlety: return "subtlety";
        case Characteristic::InternalStructure: return "internalStructure";
        case Characteristic::Calcification: return "calcification";
        case Characteristic::Sphericity: return "sphericity";
        case Characteristic::Margin: return "margin";
        case Characteristic::Lobulation: return "lobulation";
        case Characteristic::Spiculation: return "spiculation";
        case Characteristic::Texture: return "texture";
        case Characteristic::Malignancy: return "malignancy";
    }
    return "?";
}

std::pair<int, int> characteristic_range(Characteristic c) noexcept {
    return c == Characteristic::Calcification ? std::pair{1, 6} : std::pair{1, 5};
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& raw, const char* what) {
    const auto text = trim(raw);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw IngestError(IngestErrc::MalformedXml,
                          std::string("bad ") + what + " value '" + text + "'");
    }
    return value;
}

// LIDC files are not always consistent about a leading sign for z.
double parse_z(const std::string& raw) {
    auto text = trim(raw);
    if (!text.empty() && text.front() == '+') text.erase(0, 1);
    return parse_number<double>(text, "imageZposition");
}

Contour parse_roi(const pt::ptree& roi) {
    Contour contour;
    contour.z_position = parse_z(roi.get<std::string>("imageZposition", ""));
    contour.sop_id = trim(roi.get<std::string>("imageSOP_UID", ""));
    auto inclusion = trim(roi.get<std::string>("inclusion", "TRUE"));
    for (auto& ch : inclusion) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    contour.inclusion = inclusion != "FALSE";
    for (const auto& [name, child] : roi) {
        if (name != "edgeMap") continue;
        contour.points.push_back({parse_number<int>(child.get<std::string>("xCoord", ""), "xCoord"),
                                  parse_number<int>(child.get<std::string>("yCoord", ""), "yCoord")});
    }
    return contour;
}

}  // namespace

AnnotationFile parse_annotation_xml(std::string_view xml) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw IngestError(IngestErrc::MalformedXml, e.what());
    }
    if (tree.empty()) {
        throw IngestError(IngestErrc::MalformedXml, "no root element");
    }
    const auto& root = tree.front().second;

    AnnotationFile file;
    file.series_id = trim(root.get<std::string>("ResponseHeader.SeriesInstanceUid", ""));

    std::size_t session_index = 0;
    for (const auto& [session_name, session] : root) {
        if (session_name != "readingSession") continue;
        ++session_index;
        auto reader_id = trim(session.get<std::string>("servicingRadiologistID", ""));
        if (reader_id.empty()) {
            reader_id = "session-" + std::to_string(session_index);
        }
        for (const auto& [nodule_name, nodule] : session) {
            if (nodule_name != "unblindedReadNodule") continue;
            ReaderAnnotation ann;
            ann.reader_id = reader_id;
            ann.nodule_id = trim(nodule.get<std::string>("noduleID", ""));

            const auto characteristics = nodule.get_child_optional("characteristics");
            if (!characteristics || characteristics->empty()) {
                file.warnings.push_back(
                    {reader_id, ann.nodule_id, "no characteristics block; skipped"});
                continue;
            }
            for (const auto c : kAllCharacteristics) {
                const auto value = characteristics->get_optional<std::string>(characteristic_name(c));
                if (!value || trim(*value).empty()) continue;
                const int score = parse_number<int>(*value, characteristic_name(c));
                const auto [lo, hi] = characteristic_range(c);
                if (score < lo || score > hi) {
                    throw IngestError(IngestErrc::ScoreOutOfRange,
                                      std::string(characteristic_name(c)) + "=" +
                                          std::to_string(score) + " for " + ann.nodule_id +
                                          " (reader " + reader_id + ")");
                }
                ann.scores[c] = score;
            }
            for (const auto& [roi_name, roi] : nodule) {
                if (roi_name == "roi") ann.contours.push_back(parse_roi(roi));
            }
            if (ann.contours.empty()) {
                file.warnings.push_back({reader_id, ann.nodule_id, "no roi contours; skipped"});
                continue;
            }
            file.annotations.push_back(std::move(ann));
        }
    }
    return file;
}

}  // namespace nodulegen::ingest
