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

#include <cstddef>
#include <span>
#include <vector>

#include "nodulegen/common/random.hpp"
#include "nodulegen/diffusion/error.hpp"

namespace nodulegen::diffusion {

/// Variance schedule; index t - 1 holds step t for t in [1, T].
struct NoiseSchedule {
    std::vector<double> betas;
    std::vector<double> alphas;      ///< 1 - beta
    std::vector<double> alpha_bars;  ///< running product of alphas

    [[nodiscard]] std::size_t steps() const noexcept { return betas.size(); }
    [[nodiscard]] double beta(std::size_t t) const { return betas.at(t - 1); }
    [[nodiscard]] double alpha_bar(std::size_t t) const { return alpha_bars.at(t - 1); }
    /// alpha_bar(0) is 1 by convention.
    [[nodiscard]] double alpha_bar_prev(std::size_t t) const { return t <= 1 ? 1.0 : alpha_bars.at(t - 2); }
};

inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

/// Linear beta schedule. T = 1 uses beta_start. Throws InvalidRange unless
/// T >= 1 and 0 < beta_start <= beta_end < 1.
[[nodiscard]] NoiseSchedule make_schedule(std::size_t steps, double beta_start = kDefaultBetaStart,
                                          double beta_end = kDefaultBetaEnd);

/// The default range stretched so that T steps accumulate the same total
/// noise as 1000 default steps (betas scaled by 1000 / T).
[[nodiscard]] NoiseSchedule make_scaled_schedule(std::size_t steps);

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps with eps drawn from `noise`.
/// Throws StepOutOfRange unless 1 <= t <= T.
[[nodiscard]] std::vector<double> forward_diffuse(std::span<const double> x0, std::size_t t,
                                                  const NoiseSchedule& schedule, NormalSource& noise);

/// Same, with caller-supplied eps.
void forward_diffuse_with(std::span<const double> x0, std::span<const double> eps, std::size_t t,
                          const NoiseSchedule& schedule, std::span<double> out);

}  // namespace nodulegen::diffusion
