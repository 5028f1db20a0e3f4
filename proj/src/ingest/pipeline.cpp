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


#include "nodulegen/ingest/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "nodulegen/common/binary_io.hpp"
#include "nodulegen/common/png_io.hpp"

namespace nodulegen::ingest {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> files_under(const std::string& dir, const std::string& extension) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw IngestError(IngestErrc::InvalidArgument, dir + " is not a directory");
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        if (!extension.empty() && e.path().extension() != extension) continue;
        out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string file_stem_for(const std::string& id) {
    std::string out = id;
    for (auto& ch : out) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
    }
    return out;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

json record_json(const NoduleRecord& r, const std::string& image_path) {
    json scores = json::object();
    for (const auto& [c, v] : r.scores) scores[characteristic_name(c)] = v;
    return {{"nodule_id", r.nodule_id},
            {"image", image_path},
            {"scores", scores},
            {"malignancy", r.malignancy()},
            {"series_id", r.series_id},
            {"center_sop_id", r.center_sop_id},
            {"reader_ids", r.reader_ids},
            {"center_z", r.center_slice_z},
            {"max_diameter_px", r.max_diameter_px},
            {"roi_side", r.roi_side}};
}

IngestReport ingest_directories(const std::string& dicom_dir, const std::string& xml_dir,
                                const std::string& manifest_path, const IngestOptions& options) {
    IngestReport report;
    std::map<std::string, std::vector<DicomSlice>> series;
    for (const auto& path : files_under(dicom_dir, "")) {
        try {
            auto slice = parse_dicom_slice(read_file_bytes(path.string()));
            series[slice.series_id].push_back(std::move(slice));
            ++report.slices;
        } catch (const IngestError& e) {
            report.warnings.push_back(path.string() + ": " + e.what());
        }
    }

    const fs::path out_dir = fs::absolute(manifest_path).parent_path();
    fs::create_directories(out_dir / options.image_subdir);

    for (const auto& path : files_under(xml_dir, ".xml")) {
        AnnotationFile file;
        try {
            file = parse_annotation_xml(read_text(path));
        } catch (const IngestError& e) {
            report.warnings.push_back(path.string() + ": " + e.what());
            continue;
        }
        ++report.annotation_files;
        for (const auto& w : file.warnings) {
            report.warnings.push_back(path.filename().string() + ": reader " + w.reader_id + " " + w.nodule_id + ": " +
                                      w.message);
        }
        // A header without a series id can only mean the single series present.
        auto it = series.find(file.series_id);
        if (file.series_id.empty() && series.size() == 1) it = series.begin();
        if (it == series.end() || it->second.empty()) {
            report.warnings.push_back(path.filename().string() + ": no slices for series '" + file.series_id + "'");
            continue;
        }
        const auto& slices = it->second;
        const auto groups = consolidate_readers(file.annotations, options.match_radius_mm, slices.front().pixel_spacing);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            NoduleRecord record;
            try {
                record = extract_roi(groups[g], slices);
            } catch (const IngestError& e) {
                report.warnings.push_back(path.filename().string() + ": nodule group " + std::to_string(g + 1) + ": " +
                                          e.what());
                continue;
            }
            record.nodule_id = it->first + "#" + std::to_string(g + 1);
            const auto rel = (fs::path(options.image_subdir) / (file_stem_for(record.nodule_id) + ".png")).string();
            write_png((out_dir / rel).string(),
                      window_and_resize(record, options.window_level, options.window_width, options.size));
            report.records.push_back(record_json(record, rel));
        }
    }
    write_jsonl(manifest_path, report.records);
    return report;
}

}  // namespace nodulegen::ingest
