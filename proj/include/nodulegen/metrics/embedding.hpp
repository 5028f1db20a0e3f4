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

#include "nodulegen/common/error.hpp"

namespace nodulegen::metrics {

enum class MetricsErrc {
    TooFewRows,
    DimensionMismatch,
    NonConvergedEigen,
    SubsetTooLarge,
    ShapeMismatch,
    ZeroVector,
    IncompleteGrid,
    NonFinite,
    BadFormat,
    InvalidArgument,
};

[[nodiscard]] const char* code_name(MetricsErrc code) noexcept;

using MetricsError = Error<MetricsErrc>;

namespace providers {
inline constexpr const char* kInception = "inception";
inline constexpr const char* kClip = "clip";
inline constexpr const char* kBioClip = "bioclip";
inline constexpr const char* kCustom = "custom";
}  // namespace providers

/// n x d feature rows produced by an external extractor.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> data;  ///< row-major, rows * dim
    std::string provider = providers::kCustom;
    std::vector<std::string> row_ids;  ///< one per row

    EmbeddingMatrix() = default;
    /// Row ids default to "0".."n-1". Throws NonFinite / ShapeMismatch.
    EmbeddingMatrix(std::size_t n, std::size_t d, std::vector<float> values,
                    std::string provider_tag = providers::kCustom,
                    std::vector<std::string> ids = {});

    [[nodiscard]] std::span<const float> row(std::size_t i) const {
        return std::span(data).subspan(i * dim, dim);
    }

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

/// Throws MetricsError{NonFinite} on NaN or infinity.
void require_finite(std::span<const float> values, const std::string& what);

/// EMB1: "EMB1", u32 n, u32 d, u8 tag length, tag bytes, n*d f32, then n
/// row ids each terminated by '\n'. All integers and floats little-endian.
[[nodiscard]] std::vector<std::uint8_t> encode_emb1(const EmbeddingMatrix& matrix);
[[nodiscard]] EmbeddingMatrix decode_emb1(std::span<const std::uint8_t> bytes);
[[nodiscard]] EmbeddingMatrix read_emb1(const std::string& path);
void write_emb1(const std::string& path, const EmbeddingMatrix& matrix);

}  // namespace nodulegen::metrics
