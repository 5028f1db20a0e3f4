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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nodulegen/metrics/embedding.hpp"

namespace nodulegen::metrics {

/// One feature map from a perceptual network, channel-major (c, y, x).
struct ActivationLayer {
    std::uint32_t channels = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> weights;  ///< per-channel linear weights, >= 0
    std::vector<float> values;   ///< channels * height * width

    [[nodiscard]] float at(std::uint32_t c, std::uint32_t y, std::uint32_t x) const {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    friend bool operator==(const ActivationLayer&, const ActivationLayer&) = default;
};

struct ActivationStack {
    std::vector<ActivationLayer> layers;
    friend bool operator==(const ActivationStack&, const ActivationStack&) = default;
};

/// Throws ShapeMismatch, NonFinite or InvalidArgument (negative weight).
void validate(const ActivationStack& stack);

/// Learned-perceptual distance between two activation stacks.
///
/// Per layer, the channel vector at each spatial position is scaled to unit
/// length (a zero vector stays zero), the squared difference is weighted per
/// channel and summed over channels, then averaged over positions. Layer
/// terms are summed. Throws ShapeMismatch when the stacks' layouts differ.
[[nodiscard]] double lpips_distance(const ActivationStack& a, const ActivationStack& b);

/// Mean lpips_distance over index-matched (generated, reference) pairs.
[[nodiscard]] double lpips_paired(std::span<const ActivationStack> generated,
                                  std::span<const ActivationStack> reference);

/// Mean lpips_distance over all unordered pairs within `generated`.
[[nodiscard]] double lpips_diversity(std::span<const ActivationStack> generated);

/// ACT1 record: "ACT1", u32 layer count, then per layer u32 C, H, W, C f32
/// weights and C*H*W f32 values. A file holds one or more records back to
/// back, one per image.
[[nodiscard]] std::vector<std::uint8_t> encode_act1(const ActivationStack& stack);
[[nodiscard]] std::vector<ActivationStack> decode_act1(std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<ActivationStack> read_act1(const std::string& path);
void write_act1(const std::string& path, std::span<const ActivationStack> stacks);

}  // namespace nodulegen::metrics
