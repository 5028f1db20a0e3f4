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

#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodulegen/dataset/augment.hpp"
#include "nodulegen/dataset/split.hpp"

namespace nodulegen::dataset {

/// One image-text pair of the training-ready dataset.
struct ManifestEntry {
    std::string nodule_id;
    std::string image_path;
    std::string prompt;
    int malignancy = 0;
    Split split = Split::Train;
    AugmentTag augmentation{};

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

[[nodiscard]] nlohmann::json to_json(const ManifestEntry& entry);
[[nodiscard]] ManifestEntry entry_from_json(const nlohmann::json& j);

/// Attaches splits to entries; see stratified_split.
[[nodiscard]] std::vector<ManifestEntry> assign_splits(std::vector<ManifestEntry> entries,
                                                       const SplitRatios& ratios,
                                                       std::uint64_t seed);

/// Filename-safe form of a nodule id.
[[nodiscard]] std::string safe_file_stem(const std::string& id);

struct EmitOptions {
    std::set<Split> augmented_splits{Split::Train};
    std::string source_dir;  ///< base for relative image paths in the input
    std::string manifest_name = "manifest.jsonl";
};

/// Writes `out_dir/images/<nodule>_<tag>.png` and `out_dir/<manifest_name>`.
///
/// Entries in an augmented split expand to all eight symmetry variants; the
/// others are copied once as orig-noflip. Lines are ordered by (nodule id,
/// tag) and image paths are relative to `out_dir`. Throws
/// DatasetError{MissingImage} before writing anything if a source is absent.
std::vector<ManifestEntry> emit_manifest(std::span<const ManifestEntry> entries,
                                         const std::string& out_dir,
                                         const EmitOptions& options = {});

}  // namespace nodulegen::dataset
