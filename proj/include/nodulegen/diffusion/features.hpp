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

#include <span>
#include <vector>

#include "nodulegen/common/grid.hpp"
#include "nodulegen/metrics/embedding.hpp"
#include "nodulegen/metrics/lpips.hpp"

namespace nodulegen::diffusion {

/// Hand-crafted phantom descriptor standing in for network features:
/// ring-averaged intensity profile, intensity histogram, mass, centroid
/// offset, second-order shape moments and mean gradient magnitude.
inline constexpr std::size_t kRadialBins = 6;
inline constexpr std::size_t kHistogramBins = 6;
inline constexpr std::size_t kFeatureDim = kRadialBins + kHistogramBins + 1 + 2 + 2 + 1;

[[nodiscard]] std::vector<double> phantom_features(const Grid<float>& image);

/// One feature row per image.
[[nodiscard]] metrics::EmbeddingMatrix feature_matrix(std::span<const Grid<float>> images);

/// Floor on a standardized column's scale, so near-constant reference
/// features do not dominate the distances.
inline constexpr double kMinFeatureScale = 0.01;

/// Column-wise affine map fitted on a reference set: (x - mean) / max(std,
/// kMinFeatureScale).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    [[nodiscard]] static Standardizer fit(const metrics::EmbeddingMatrix& reference);
    [[nodiscard]] metrics::EmbeddingMatrix apply(const metrics::EmbeddingMatrix& m) const;
};

/// Perceptual activations: [intensity, d/dx, d/dy] at full resolution and
/// after 2x2 average pooling, each layer with unit channel weights.
[[nodiscard]] metrics::ActivationStack perceptual_stack(const Grid<float>& image);

}  // namespace nodulegen::diffusion
