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

#include "nodulegen/metrics/kid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nodulegen/common/random.hpp"

namespace nodulegen::metrics {

namespace {

double resolved_gamma(const PolyKernel& k, std::size_t d) {
    return k.gamma > 0.0 ? k.gamma : 1.0 / static_cast<double>(d);
}

Eigen::MatrixXd gather_rows(const EmbeddingMatrix& e, std::span<const std::size_t> rows) {
    Eigen::MatrixXd out(rows.size(), e.dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = e.row(rows[i]);
        for (std::size_t j = 0; j < e.dim; ++j) out(i, j) = r[j];
    }
    return out;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const PolyKernel& k, double gamma) {
    Eigen::MatrixXd g = a * b.transpose();
    return g.unaryExpr([&](double v) { return std::pow(gamma * v + k.coef, k.degree); });
}

double mmd2_from_rows(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const PolyKernel& k,
                      double gamma) {
    const auto m = static_cast<double>(x.rows());
    const auto n = static_cast<double>(y.rows());
    const Eigen::MatrixXd kxx = kernel_matrix(x, x, k, gamma);
    const Eigen::MatrixXd kyy = kernel_matrix(y, y, k, gamma);
    const Eigen::MatrixXd kxy = kernel_matrix(x, y, k, gamma);
    const double sxx = kxx.sum() - kxx.trace();
    const double syy = kyy.sum() - kyy.trace();
    return sxx / (m * (m - 1.0)) + syy / (n * (n - 1.0)) - 2.0 * kxy.sum() / (m * n);
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::mt19937_64& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first `count` slots form the sample.
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

}  // namespace

double poly_kernel(std::span<const float> x, std::span<const float> y, const PolyKernel& k) {
    if (x.size() != y.size()) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
    if (x.empty()) {
        throw MetricsError(MetricsErrc::DimensionMismatch, "zero-dimensional vectors");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<double>(x[i]) * y[i];
    return std::pow(resolved_gamma(k, x.size()) * dot + k.coef, k.degree);
}

double mmd2_unbiased(const EmbeddingMatrix& x, const EmbeddingMatrix& y, const PolyKernel& k) {
    if (x.rows < 2 || y.rows < 2) {
        throw MetricsError(MetricsErrc::TooFewRows, "MMD needs at least 2 rows per set");
    }
    if (x.dim != y.dim || x.dim == 0) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(x.dim) + " vs " + std::to_string(y.dim));
    }
    std::vector<std::size_t> xr(x.rows), yr(y.rows);
    std::iota(xr.begin(), xr.end(), 0);
    std::iota(yr.begin(), yr.end(), 0);
    return mmd2_from_rows(gather_rows(x, xr), gather_rows(y, yr), k, resolved_gamma(k, x.dim));
}

KidResult kid_unbiased(const EmbeddingMatrix& x, const EmbeddingMatrix& y, const KidOptions& options) {
    if (x.rows < 2 || y.rows < 2) {
        throw MetricsError(MetricsErrc::TooFewRows, "KID needs at least 2 rows per set");
    }
    if (x.dim != y.dim || x.dim == 0) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(x.dim) + " vs " + std::to_string(y.dim));
    }
    const std::size_t smallest = std::min(x.rows, y.rows);
    const std::size_t m = options.subset_size == 0 ? std::min<std::size_t>(smallest, 1000)
                                                   : options.subset_size;
    if (m > smallest) {
        throw MetricsError(MetricsErrc::SubsetTooLarge,
                           "subset " + std::to_string(m) + " > " + std::to_string(smallest));
    }
    if (m < 2 || options.n_subsets == 0) {
        throw MetricsError(MetricsErrc::InvalidArgument, "need subset_size >= 2 and n_subsets >= 1");
    }

    const double gamma = resolved_gamma(options.kernel, x.dim);
    std::mt19937_64 rng(options.seed);
    std::vector<double> values;
    values.reserve(options.n_subsets);
    for (std::size_t s = 0; s < options.n_subsets; ++s) {
        const auto xs = sample_without_replacement(x.rows, m, rng);
        const auto ys = sample_without_replacement(y.rows, m, rng);
        values.push_back(mmd2_from_rows(gather_rows(x, xs), gather_rows(y, ys), options.kernel, gamma));
    }
    KidResult result;
    result.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - result.mean) * (v - result.mean);
    result.std = std::sqrt(ss / static_cast<double>(values.size()));
    return result;
}

}  // namespace nodulegen::metrics
