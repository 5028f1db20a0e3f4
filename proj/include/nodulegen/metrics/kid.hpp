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

#include "nodulegen/metrics/embedding.hpp"

namespace nodulegen::metrics {

/// k(x, y) = (gamma * x.y + coef)^degree. gamma <= 0 means 1/d.
struct PolyKernel {
    int degree = 3;
    double gamma = 0.0;
    double coef = 1.0;
};

/// (x.y / d + 1)^3 unless `kernel` overrides. Throws DimensionMismatch.
[[nodiscard]] double poly_kernel(std::span<const float> x, std::span<const float> y,
                                 const PolyKernel& kernel = {});

struct KidOptions {
    std::size_t subset_size = 0;  ///< 0 means min(n_x, n_y, 1000)
    std::size_t n_subsets = 100;
    std::uint64_t seed = 0;
    PolyKernel kernel{};
};

struct KidResult {
    double mean = 0.0;
    double std = 0.0;  ///< population standard deviation over subsets
};

/// Unbiased MMD^2 between the full row sets of X and Y, which need not have
/// the same row count.
[[nodiscard]] double mmd2_unbiased(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                                   const PolyKernel& kernel = {});

/// Kernel inception distance: mean and spread of the unbiased MMD^2 over
/// random equal-size subsets drawn without replacement from each set.
///
/// Throws TooFewRows (either set has < 2 rows), DimensionMismatch, or
/// SubsetTooLarge (subset_size > min(n_x, n_y)).
[[nodiscard]] KidResult kid_unbiased(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                                     const KidOptions& options = {});

}  // namespace nodulegen::metrics
