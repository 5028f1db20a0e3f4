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

#include "nodulegen/metrics/clip_score.hpp"

#include <algorithm>
#include <cmath>

namespace nodulegen::metrics {

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw MetricsError(MetricsErrc::ZeroVector, "cosine of a zero vector");
    }
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double clip_score(std::span<const float> image_embedding, std::span<const float> text_embedding,
                  double w) {
    return w * std::max(cosine_similarity(image_embedding, text_embedding), 0.0);
}

double mean_clip_score(const EmbeddingMatrix& images, const EmbeddingMatrix& texts, double w) {
    if (images.rows != texts.rows || images.rows == 0) {
        throw MetricsError(MetricsErrc::ShapeMismatch,
                           "image/text rows must pair up (" + std::to_string(images.rows) + " vs " +
                               std::to_string(texts.rows) + ")");
    }
    if (images.dim != texts.dim) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(images.dim) + " vs " + std::to_string(texts.dim));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < images.rows; ++i) sum += clip_score(images.row(i), texts.row(i), w);
    return sum / static_cast<double>(images.rows);
}

}  // namespace nodulegen::metrics
