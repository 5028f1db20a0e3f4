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

#include "nodulegen/dataset/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/common/png_io.hpp"

namespace nodulegen::dataset {

namespace fs = std::filesystem;

nlohmann::json to_json(const ManifestEntry& e) {
    return {{"nodule_id", e.nodule_id},
            {"image", e.image_path},
            {"prompt", e.prompt},
            {"malignancy", e.malignancy},
            {"split", split_name(e.split)},
            {"augmentation", tag_name(e.augmentation)}};
}

ManifestEntry entry_from_json(const nlohmann::json& j) {
    try {
        ManifestEntry e;
        e.nodule_id = j.at("nodule_id").get<std::string>();
        e.image_path = j.at("image").get<std::string>();
        e.prompt = j.value("prompt", std::string());
        e.malignancy = j.at("malignancy").get<int>();
        e.split = j.contains("split") ? parse_split(j.at("split").get<std::string>()) : Split::Train;
        e.augmentation = j.contains("augmentation")
                             ? parse_tag(j.at("augmentation").get<std::string>())
                             : AugmentTag{};
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw DatasetError(DatasetErrc::InvalidEntry, ex.what());
    }
}

std::vector<ManifestEntry> assign_splits(std::vector<ManifestEntry> entries,
                                         const SplitRatios& ratios, std::uint64_t seed) {
    std::vector<StratumItem> items;
    items.reserve(entries.size());
    for (const auto& e : entries) items.push_back({e.nodule_id, e.malignancy});
    const auto splits = stratified_split(items, ratios, seed);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].split = splits[i];
    return entries;
}

std::string safe_file_stem(const std::string& id) {
    std::string out = id;
    for (auto& ch : out) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
        if (!ok) ch = '_';
    }
    return out;
}

std::vector<ManifestEntry> emit_manifest(std::span<const ManifestEntry> entries,
                                         const std::string& out_dir, const EmitOptions& options) {
    auto resolve = [&](const std::string& path) {
        const fs::path p(path);
        return p.is_absolute() || options.source_dir.empty() ? p : fs::path(options.source_dir) / p;
    };
    for (const auto& e : entries) {
        if (!fs::is_regular_file(resolve(e.image_path))) {
            throw DatasetError(DatasetErrc::MissingImage, resolve(e.image_path).string());
        }
    }

    std::vector<const ManifestEntry*> ordered;
    for (const auto& e : entries) ordered.push_back(&e);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->nodule_id < b->nodule_id; });

    fs::create_directories(fs::path(out_dir) / "images");
    std::vector<ManifestEntry> lines;
    for (const auto* e : ordered) {
        const auto image = read_png(resolve(e->image_path).string());
        const bool expand = options.augmented_splits.count(e->split) != 0;
        const std::size_t variants = expand ? 8 : 1;
        const auto augmented = expand ? augment(image)
                                      : std::array<AugmentedImage, 8>{AugmentedImage{{}, image}};
        for (std::size_t k = 0; k < variants; ++k) {
            const auto& [tag, pixels] = augmented[k];
            const auto rel = fs::path("images") / (safe_file_stem(e->nodule_id) + "_" + tag_name(tag) + ".png");
            write_png((fs::path(out_dir) / rel).string(), pixels);
            ManifestEntry line = *e;
            line.image_path = rel.generic_string();
            line.augmentation = tag;
            lines.push_back(std::move(line));
        }
    }

    std::vector<nlohmann::json> rows;
    rows.reserve(lines.size());
    for (const auto& l : lines) rows.push_back(to_json(l));
    write_jsonl((fs::path(out_dir) / options.manifest_name).string(), rows);
    return lines;
}

}  // namespace nodulegen::dataset
