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

#include "nodulegen/dataset/augment.hpp"

namespace nodulegen::dataset {

const std::array<AugmentTag, 8>& all_augment_tags() {
    static const std::array<AugmentTag, 8> tags{{{0, false}, {0, true}, {1, false}, {1, true},
                                                 {2, false}, {2, true}, {3, false}, {3, true}}};
    return tags;
}

std::string tag_name(AugmentTag tag) {
    static const char* const rotations[] = {"orig", "r90", "r180", "r270"};
    return std::string(rotations[((tag.quarter_turns % 4) + 4) % 4]) + (tag.flip ? "-flip" : "-noflip");
}

AugmentTag parse_tag(const std::string& name) {
    for (const auto& tag : all_augment_tags()) {
        if (tag_name(tag) == name) return tag;
    }
    throw DatasetError(DatasetErrc::InvalidEntry, "unknown augmentation tag '" + name + "'");
}

std::size_t tag_index(AugmentTag tag) {
    const auto& tags = all_augment_tags();
    tag.quarter_turns = ((tag.quarter_turns % 4) + 4) % 4;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i] == tag) return i;
    }
    return 0;
}

AugmentTag compose(AugmentTag second, AugmentTag first) {
    // With R a quarter turn and F the mirror, F R = R^-1 F, so
    // F^a R^p F^b R^q = F^(a^b) R^(b ? q - p : q + p).
    const int turns = first.flip ? first.quarter_turns - second.quarter_turns
                                 : first.quarter_turns + second.quarter_turns;
    return {((turns % 4) + 4) % 4, second.flip != first.flip};
}

std::array<AugmentedImage, 8> augment(const Grid<std::uint8_t>& image) {
    if (!image.square()) {
        throw DatasetError(DatasetErrc::NonSquareImage,
                           std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
    }
    std::array<AugmentedImage, 8> out;
    Grid<std::uint8_t> rotated = image;
    for (int k = 0; k < 4; ++k) {
        out[2 * k] = {AugmentTag{k, false}, rotated};
        out[2 * k + 1] = {AugmentTag{k, true}, flip_horizontal(rotated)};
        rotated = rotate90_ccw(rotated);
    }
    return out;
}

}  // namespace nodulegen::dataset
