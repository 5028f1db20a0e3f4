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
#include <vector>

#include <Eigen/Dense>

#include "nodulegen/common/grid.hpp"
#include "nodulegen/diffusion/denoiser.hpp"
#include "nodulegen/diffusion/schedule.hpp"

namespace nodulegen::diffusion {

/// Classifier-free guidance: eps_null + gs (eps_cond - eps_null), evaluated
/// as eps_cond + (gs - 1)(eps_cond - eps_null) so that gs = 1 returns
/// eps_cond bit-exactly; gs = 0 returns eps_null.
[[nodiscard]] Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& eps_cond,
                                          const Eigen::MatrixXd& eps_null, double gs);

struct SampleRequest {
    prompt::FindingVector condition;
    std::uint64_t seed = 0;  ///< drives x_T and every ancestral step
};

/// DDPM ancestral sampling with guidance scale `gs`. The predicted x0 is
/// clipped to [-1, 1] before forming the posterior mean; the posterior
/// variance is beta-tilde. Each sample draws its noise from its own seed;
/// output is bit-reproducible for a fixed batch size.
[[nodiscard]] std::vector<Grid<float>> sample_cfg(const Denoiser& model, const NoiseSchedule& schedule,
                                                  std::span<const SampleRequest> requests, double gs,
                                                  std::size_t batch_size = 64);

}  // namespace nodulegen::diffusion
