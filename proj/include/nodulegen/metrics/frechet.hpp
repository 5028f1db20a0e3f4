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

#include <Eigen/Dense>

#include "nodulegen/metrics/embedding.hpp"

namespace nodulegen::metrics {

/// Gaussian fitted to feature rows.
struct GaussianMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  ///< symmetric, unbiased (n - 1) normalization
};

/// Column mean and unbiased sample covariance in double precision.
/// Throws MetricsError{TooFewRows} when n < 2.
[[nodiscard]] GaussianMoments fit_moments(const EmbeddingMatrix& embeddings);

/// Throws MetricsError{InvalidArgument} unless `cov` is symmetric within 1e-9
/// and its eigenvalues are >= -1e-8 * trace.
void validate(const GaussianMoments& moments);

/// Frechet distance between two Gaussians:
///   |mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^(1/2)).
///
/// The trace of the matrix root is taken from the eigenvalues of the
/// symmetric product S_a^(1/2) S_b S_a^(1/2), which shares its spectrum with
/// S_a S_b. Negative eigenvalues from round-off are clamped to zero, and the
/// result is clamped to be non-negative.
[[nodiscard]] double frechet_distance(const GaussianMoments& a, const GaussianMoments& b);

/// fit_moments on both sets followed by frechet_distance.
[[nodiscard]] double fid(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

}  // namespace nodulegen::metrics
