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
#include <string>
#include <utility>

#include "nodulegen/common/grid.hpp"
#include "nodulegen/dataset/split.hpp"

namespace nodulegen::dataset {

/// An element of the square's symmetry group: rotate counter-clockwise by
/// quarter_turns * 90 degrees, then mirror left-right when `flip` is set.
struct AugmentTag {
    int quarter_turns = 0;  ///< 0..3
    bool flip = false;

    friend bool operator==(const AugmentTag&, const AugmentTag&) = default;
    friend auto operator<=>(const AugmentTag&, const AugmentTag&) = default;
};

/// All eight tags in canonical order: orig, r90, r180, r270, each noflip then flip.
[[nodiscard]] const std::array<AugmentTag, 8>& all_augment_tags();

/// "orig-noflip", "r90-flip", ...
[[nodiscard]] std::string tag_name(AugmentTag tag);
[[nodiscard]] AugmentTag parse_tag(const std::string& name);
/// Position of `tag` in all_augment_tags().
[[nodiscard]] std::size_t tag_index(AugmentTag tag);

/// Tag equivalent to applying `second` after `first`.
[[nodiscard]] AugmentTag compose(AugmentTag second, AugmentTag first);

template <typename T>
[[nodiscard]] Grid<T> rotate90_ccw(const Grid<T>& in) {
    const std::size_t n = in.rows();
    Grid<T> out(in.cols(), n);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            out(r, c) = in(c, in.cols() - 1 - r);
        }
    }
    return out;
}

template <typename T>
[[nodiscard]] Grid<T> flip_horizontal(const Grid<T>& in) {
    Grid<T> out(in.rows(), in.cols());
    for (std::size_t r = 0; r < in.rows(); ++r) {
        for (std::size_t c = 0; c < in.cols(); ++c) {
            out(r, c) = in(r, in.cols() - 1 - c);
        }
    }
    return out;
}

/// Applies `tag`; throws DatasetError{NonSquareImage} for non-square input.
template <typename T>
[[nodiscard]] Grid<T> apply_tag(const Grid<T>& image, AugmentTag tag) {
    if (!image.square()) {
        throw DatasetError(DatasetErrc::NonSquareImage,
                           std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
    }
    Grid<T> out = image;
    for (int k = 0; k < ((tag.quarter_turns % 4) + 4) % 4; ++k) out = rotate90_ccw(out);
    if (tag.flip) out = flip_horizontal(out);
    return out;
}

using AugmentedImage = std::pair<AugmentTag, Grid<std::uint8_t>>;

/// The eight symmetry variants of a square image, in all_augment_tags() order.
[[nodiscard]] std::array<AugmentedImage, 8> augment(const Grid<std::uint8_t>& image);

}  // namespace nodulegen::dataset
