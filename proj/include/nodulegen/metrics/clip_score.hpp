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

#include "nodulegen/metrics/embedding.hpp"

namespace nodulegen::metrics {

inline constexpr double kClipScoreWeight = 2.5;

/// Cosine similarity; throws MetricsError{ZeroVector} / DimensionMismatch.
[[nodiscard]] double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// w * max(cos(image, text), 0). BioCLIPScore is the same quantity computed
/// on embeddings from a biomedical CLIP provider.
[[nodiscard]] double clip_score(std::span<const float> image_embedding,
                                std::span<const float> text_embedding,
                                double w = kClipScoreWeight);

/// Per-image mean of clip_score over row-aligned image/text pairs.
[[nodiscard]] double mean_clip_score(const EmbeddingMatrix& images, const EmbeddingMatrix& texts,
                                     double w = kClipScoreWeight);

}  // namespace nodulegen::metrics
