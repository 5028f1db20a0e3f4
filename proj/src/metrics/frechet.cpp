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

#include "nodulegen/metrics/frechet.hpp"

#include <algorithm>
#include <cmath>

namespace nodulegen::metrics {

namespace {

Eigen::MatrixXd to_matrix(const EmbeddingMatrix& e) {
    Eigen::MatrixXd x(e.rows, e.dim);
    for (std::size_t i = 0; i < e.rows; ++i) {
        for (std::size_t j = 0; j < e.dim; ++j) x(i, j) = e.data[i * e.dim + j];
    }
    return x;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_of(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw MetricsError(MetricsErrc::NonConvergedEigen,
                           "symmetric eigensolver failed on " + std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()) + " matrix");
    }
    return solver;
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
    const auto solver = eigen_of(m);
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

GaussianMoments fit_moments(const EmbeddingMatrix& e) {
    if (e.rows < 2) {
        throw MetricsError(MetricsErrc::TooFewRows,
                           "need at least 2 rows, have " + std::to_string(e.rows));
    }
    const Eigen::MatrixXd x = to_matrix(e);
    GaussianMoments m;
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
    m.cov = (centered.transpose() * centered) / static_cast<double>(e.rows - 1);
    m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
    return m;
}

void validate(const GaussianMoments& g) {
    const auto d = g.mean.size();
    if (g.cov.rows() != d || g.cov.cols() != d) {
        throw MetricsError(MetricsErrc::DimensionMismatch, "covariance is not d x d");
    }
    if (!g.mean.allFinite() || !g.cov.allFinite()) {
        throw MetricsError(MetricsErrc::NonFinite, "moments contain non-finite values");
    }
    if ((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw MetricsError(MetricsErrc::InvalidArgument, "covariance is not symmetric");
    }
    if (d == 0) return;
    const double trace = g.cov.trace();
    const double lowest = eigen_of(g.cov).eigenvalues().minCoeff();
    if (lowest < -1e-8 * std::abs(trace)) {
        throw MetricsError(MetricsErrc::InvalidArgument, "covariance is not positive semi-definite");
    }
}

double frechet_distance(const GaussianMoments& a, const GaussianMoments& b) {
    if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows()) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(a.mean.size()) + " vs " + std::to_string(b.mean.size()));
    }
    if (a.mean.size() == 0) return 0.0;
    const double mean_term = (a.mean - b.mean).squaredNorm();

    const Eigen::MatrixXd root_a = symmetric_sqrt(a.cov);
    Eigen::MatrixXd product = root_a * b.cov * root_a;
    product = 0.5 * (product + product.transpose()).eval();
    const Eigen::VectorXd lambda = eigen_of(product).eigenvalues();
    double trace_root = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) trace_root += std::sqrt(std::max(lambda(i), 0.0));

    const double distance = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * trace_root;
    return std::max(distance, 0.0);
}

double fid(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    if (a.dim != b.dim) {
        throw MetricsError(MetricsErrc::DimensionMismatch,
                           std::to_string(a.dim) + " vs " + std::to_string(b.dim));
    }
    return frechet_distance(fit_moments(a), fit_moments(b));
}

}  // namespace nodulegen::metrics
