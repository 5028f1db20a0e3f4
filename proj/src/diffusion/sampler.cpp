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

#include "nodulegen/diffusion/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "nodulegen/common/random.hpp"
#include "nodulegen/diffusion/train.hpp"

namespace nodulegen::diffusion {

Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& eps_cond, const Eigen::MatrixXd& eps_null, double gs) {
    if (eps_cond.rows() != eps_null.rows() || eps_cond.cols() != eps_null.cols()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "conditional and null predictions differ in shape");
    }
    if (gs == 0.0) return eps_null;
    return eps_cond + (gs - 1.0) * (eps_cond - eps_null);
}

std::vector<Grid<float>> sample_cfg(const Denoiser& model, const NoiseSchedule& schedule,
                                    std::span<const SampleRequest> requests, double gs, std::size_t batch_size) {
    const auto& config = model.config();
    if (config.steps != schedule.steps() || model.alpha_bars() != schedule.alpha_bars) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "model was trained with a different schedule");
    }
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(config.pixels))));
    if (side * side != config.pixels) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "model pixels do not form a square image");
    }
    batch_size = std::max<std::size_t>(batch_size, 1);
    const auto P = static_cast<Eigen::Index>(config.pixels);

    std::vector<Grid<float>> out;
    out.reserve(requests.size());
    for (std::size_t start = 0; start < requests.size(); start += batch_size) {
        const std::size_t n = std::min(batch_size, requests.size() - start);
        const auto N = static_cast<Eigen::Index>(n);
        std::vector<NormalSource> noise;
        noise.reserve(n);
        Eigen::MatrixXd x(P, N);
        for (std::size_t j = 0; j < n; ++j) {
            noise.emplace_back(requests[start + j].seed);
            for (Eigen::Index i = 0; i < P; ++i) x(i, static_cast<Eigen::Index>(j)) = noise[j]();
        }

        std::vector<DenoiserInput> inputs(2 * n);
        for (std::size_t t = schedule.steps(); t >= 1; --t) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::span<const double> col(x.col(static_cast<Eigen::Index>(j)).data(), config.pixels);
                inputs[j] = {col, t, requests[start + j].condition};
                inputs[n + j] = {col, t, std::nullopt};
            }
            const Eigen::MatrixXd both = model.predict(inputs);
            const Eigen::MatrixXd eps = cfg_combine(both.leftCols(N), both.rightCols(N), gs);

            const double ab = schedule.alpha_bar(t);
            const double ab_prev = schedule.alpha_bar_prev(t);
            const double beta = schedule.beta(t);
            const double c_x0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
            const double c_xt = std::sqrt(1.0 - beta) * (1.0 - ab_prev) / (1.0 - ab);
            const double sigma = std::sqrt(beta * (1.0 - ab_prev) / (1.0 - ab));

            Eigen::MatrixXd x0 = (x - std::sqrt(1.0 - ab) * eps) / std::sqrt(ab);
            x0 = x0.cwiseMax(-1.0).cwiseMin(1.0);
            x = c_x0 * x0 + c_xt * x;
            if (t > 1) {
                for (std::size_t j = 0; j < n; ++j) {
                    for (Eigen::Index i = 0; i < P; ++i) x(i, static_cast<Eigen::Index>(j)) += sigma * noise[j]();
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            out.push_back(from_model_space(std::span<const double>(x.col(static_cast<Eigen::Index>(j)).data(),
                                                                   config.pixels),
                                           side));
        }
    }
    return out;
}

}  // namespace nodulegen::diffusion
